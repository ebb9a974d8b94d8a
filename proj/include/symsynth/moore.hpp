#pragma once

#include <symsynth/architecture.hpp>
#include <symsynth/valuation.hpp>

#include <optional>
#include <string>
#include <vector>

namespace symsynth
{

// Deterministic Moore machine over explicitly enumerated input letters.
//
// Input letters are the subsets of `inputs`, numbered by packing the input
// bits in increasing bit order. On t_0 ... t_k the visited states are
// s_0 = initial, s_{i+1} = delta(s_i, t_i); the trace letter at position i
// is L(s_i) | t_i.
//
// A process machine has `local_outputs` set: its labels only use the index-0
// output bits of the universe, read as the process-local outputs.
class moore_machine
{
public:
    moore_machine( signature sig, prop_mask inputs, prop_mask outputs, bool local_outputs, int initial,
                   std::vector<valuation> labels, std::vector<int> delta );

    const signature& sig() const { return _sig; }
    prop_mask inputs() const { return _inputs; }
    prop_mask outputs() const { return _outputs; }
    bool local_outputs() const { return _local_outputs; }

    int num_states() const { return static_cast<int>( _labels.size() ); }
    int initial() const { return _initial; }
    valuation label( int state ) const { return _labels[ state ]; }
    const std::vector<valuation>& labels() const { return _labels; }

    int num_letters() const { return static_cast<int>( _letters.size() ); }
    valuation letter( int index ) const { return _letters[ index ]; }
    const std::vector<valuation>& letters() const { return _letters; }
    int letter_index( valuation v ) const;

    int next( int state, int letter ) const { return _delta[ static_cast<std::size_t>( state ) * _letters.size() + letter ]; }
    int step( int state, valuation input ) const { return next( state, letter_index( input ) ); }
    const std::vector<int>& delta() const { return _delta; }

private:
    signature _sig;
    prop_mask _inputs;
    prop_mask _outputs;
    bool _local_outputs;
    int _initial;
    std::vector<valuation> _labels;
    std::vector<int> _delta;
    std::vector<valuation> _letters;
};

struct machine_run
{
    std::vector<int> states;
    std::vector<valuation> outputs;
};

// states s_0 ... s_k and labels L(s_0) ... L(s_k) for |inputs| = k.
machine_run run_machine( const moore_machine& m, const word& inputs );
// The trace L(s_0) | t_0, L(s_1) | t_1, ... of an ultimately periodic input.
lasso_word run_lasso( const moore_machine& m, const lasso_word& inputs );
// tau(t) = L(delta*(initial, t)).
valuation output_after( const moore_machine& m, const word& inputs );

moore_machine reachable_part( const moore_machine& m );
// Moore partition refinement on the reachable part; state 0 is initial.
moore_machine minimize( const moore_machine& m );
// True iff both machines induce the same computation tree.
bool bisim_equiv( const moore_machine& a, const moore_machine& b );

// The machine of n copies of a process in a ring: component j reads
// rot(input, -j) and its local label is placed at index j.
moore_machine symmetric_product( const moore_machine& process, int n );
// Plugs one process implementation into every process slot of the wiring.
moore_machine aggregate_machine( const moore_machine& process, const symmetric_wiring& wiring );
// Keeps process 0's outputs as local outputs, then minimizes.
moore_machine extract_process( const moore_machine& global );

struct symmetry_violation
{
    word witness;
    int rotation;
};

// Checks tau(rot(t,i)) = rot(tau(t),i) for all t and i by a pair-graph
// search; a violation carries a shortest witness.
std::optional<symmetry_violation> symmetry_check( const moore_machine& g, int n );
// Checks reps(t) | rep(tau(t)) for every input word t.
std::optional<word> reps_divisibility_check( const moore_machine& g, int n );

class completion_error : public error
{
public:
    completion_error( const std::string& what, word witness ) : error( what ), _witness{ std::move( witness ) } {}
    const word& witness() const { return _witness; }

private:
    word _witness;
};

// Relabels every input word t with rot(tau(eta(t)), -shift) where eta(t) =
// rot(t, shift) is the minimal rotation. Throws completion_error when the
// divisibility precondition fails.
moore_machine symmetric_completion( const moore_machine& g, int n );

// Renames output bits through `map` (bit -> bit); used to compare machines
// whose wirings number processes differently.
moore_machine rename_outputs( const moore_machine& m, const std::vector<int>& map );
// Moves a machine onto another universe with the same proposition names.
moore_machine rebind( const moore_machine& m, const signature& target );

} // namespace symsynth
