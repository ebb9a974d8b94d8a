#pragma once

#include <symsynth/architecture.hpp>
#include <symsynth/buchi.hpp>
#include <symsynth/formula.hpp>
#include <symsynth/moore.hpp>
#include <symsynth/sat.hpp>

#include <functional>
#include <optional>
#include <stop_token>
#include <string>
#include <variant>
#include <vector>

namespace symsynth
{

// Machine with at most `bound` states all of whose traces are rejected by
// `bad` read as a universal co-Büchi automaton (no run visits an accepting
// state infinitely often). nullopt iff no such machine exists at this bound.
std::optional<moore_machine> bounded_synthesis( const buchi_automaton& bad, prop_mask inputs, prop_mask outputs, int bound,
                                                sat_solver& solver, std::stop_token stop = {} );
// Same, with `bad` the automaton of !phi.
std::optional<moore_machine> bounded_synthesis( const formula& phi, const signature& sig, prop_mask inputs, prop_mask outputs,
                                                int bound, sat_solver& solver, std::stop_token stop = {} );

// Finite-state environment: in state e, after seeing the current output
// letter o, it supplies choice(e, o) as the input and moves to next(e, o).
// This respects Moore timing: the input at step i may depend on outputs
// 0..i.
struct env_strategy
{
    signature sig;
    prop_mask inputs = 0;
    prop_mask outputs = 0;
    std::vector<valuation> observations;
    // Indexed by state * |observations| + observation.
    std::vector<valuation> choices;
    std::vector<int> successors;

    int num_states() const { return observations.empty() ? 0 : static_cast<int>( choices.size() / observations.size() ); }
    int observation_index( valuation output ) const;
    valuation choice( int state, valuation output ) const;
    int next( int state, valuation output ) const;
};

// Strategy with at most `bound` states that makes every trace violate phi.
std::optional<env_strategy> counter_strategy( const formula& phi, const signature& sig, prop_mask inputs, prop_mask outputs,
                                              int bound, sat_solver& solver, std::stop_token stop = {} );

// True iff every trace `env` admits violates phi.
bool strategy_wins( const env_strategy& env, const formula& phi );

// The unique infinite trace produced when `env` drives `system`.
lasso_word play( const env_strategy& env, const moore_machine& system );

std::string format_strategy( const env_strategy& env );

struct realizable
{
    moore_machine process;
    moore_machine global;
    int bound;
};

struct unrealizable
{
    env_strategy counter;
    int bound;
};

struct unknown
{
    int max_bound;
    int unreal_bound;
};

using synthesis_verdict = std::variant<realizable, unrealizable, unknown>;

// Raised when a synthesized machine fails one of the release checks.
class verification_error : public error
{
public:
    using error::error;
};

struct synthesis_options
{
    int max_bound = 8;
    int unreal_bound = 4;
    // Embedded solver when null. Called from two threads at once.
    sat_solver* solver = nullptr;
    std::function<void( const std::string& )> progress;
};

// Strengthens phi to all rotations and adds the output condition. System
// bounds 1..max_bound and environment bounds 1..unreal_bound are searched in
// order on two threads; the first verdict cancels the other search. A
// realizable result is then completed, extracted and verified.
synthesis_verdict synth_symmetric( const architecture& arch, const formula& phi, const synthesis_options& options = {} );

// Largest input alphabet synth_symmetric accepts, in bits.
inline constexpr int max_input_bits = 8;

} // namespace symsynth
