#pragma once

#include <symsynth/valuation.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace symsynth
{

// n identical processes; process i reads every global input, rotated by its
// own index, and drives the outputs (o, i).
class architecture
{
public:
    architecture( int n, std::vector<std::string> local_inputs, std::vector<std::string> outputs );

    int processes() const { return _n; }
    const std::vector<std::string>& local_inputs() const { return _local_inputs; }
    const std::vector<std::string>& outputs() const { return _outputs; }

    // names = local inputs followed by outputs.
    const signature& sig() const { return _sig; }
    prop_mask input_mask() const { return _input_mask; }
    prop_mask output_mask() const { return _output_mask; }
    // Outputs of process 0, which double as the local outputs of one process.
    prop_mask local_output_mask() const { return _output_mask & _sig.index_mask( 0 ); }

private:
    int _n;
    std::vector<std::string> _local_inputs;
    std::vector<std::string> _outputs;
    signature _sig;
    prop_mask _input_mask = 0;
    prop_mask _output_mask = 0;
};

// General symmetric architecture (S, P, AP_G^I, E_in, E_out) over a process
// interface. Process propositions and global propositions live in separate
// universes; edges map bits of the first onto bits of the second.
struct symmetric_wiring
{
    signature process_sig;
    prop_mask process_inputs = 0;
    prop_mask process_outputs = 0;

    signature global_sig;
    prop_mask global_inputs = 0;
    prop_mask signals = 0;

    int process_count = 0;
    // (process, local input bit) -> global input or signal bit.
    std::map<std::pair<int, int>, int> input_edges;
    // (process, local output bit) -> signal bit.
    std::map<std::pair<int, int>, int> output_edges;
};

// Throws when an edge is missing or dangling, or a signal does not have
// exactly one writer.
void validate( const symmetric_wiring& wiring );

// E_in(p_i, (x, j)) = (x, (j - i) mod n) and E_out(p_i, o) = (o, i).
symmetric_wiring rotation_wiring( const architecture& arch );

} // namespace symsynth
