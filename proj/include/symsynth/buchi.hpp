#pragma once

#include <symsynth/formula.hpp>
#include <symsynth/moore.hpp>

#include <optional>
#include <string>
#include <vector>

namespace symsynth
{

// Conjunction of literals: `pos` bits must be set, `neg` bits clear.
struct cube
{
    prop_mask pos = 0;
    prop_mask neg = 0;

    bool matches( valuation v ) const { return ( v.bits & pos ) == pos && !( v.bits & neg ); }
    // Every letter matching `other` also matches this cube.
    bool weaker_than( const cube& other ) const { return ( pos & ~other.pos ) == 0 && ( neg & ~other.neg ) == 0; }

    friend auto operator<=>( const cube&, const cube& ) = default;
};

struct nba_edge
{
    cube guard;
    int to;

    friend auto operator<=>( const nba_edge&, const nba_edge& ) = default;
};

// State-based Büchi automaton over 2^AP of a signature. Edge guards are
// cubes, so one edge stands for every letter it matches.
class buchi_automaton
{
public:
    buchi_automaton( signature sig, std::vector<std::vector<nba_edge>> edges, std::vector<int> initial,
                     std::vector<bool> accepting );

    const signature& sig() const { return _sig; }
    int num_states() const { return static_cast<int>( _edges.size() ); }
    const std::vector<nba_edge>& edges( int state ) const { return _edges[ state ]; }
    const std::vector<int>& initial() const { return _initial; }
    bool accepting( int state ) const { return _accepting[ state ]; }

    // Accepting state whose only purpose is a `true` self-loop: reaching it
    // already decides acceptance.
    bool accepting_sink( int state ) const;

private:
    signature _sig;
    std::vector<std::vector<nba_edge>> _edges;
    std::vector<int> _initial;
    std::vector<bool> _accepting;
};

// Tableau translation with on-the-fly expansion into a generalized automaton,
// degeneralized by a level counter, then pruned and state-merged.
buchi_automaton ltl_to_nba( const formula& phi, const signature& sig );

bool nba_accepts_lasso( const buchi_automaton& a, const lasso_word& w );

struct counterexample
{
    // Letters L(s_i) | i_i of the violating run.
    lasso_word trace;
    // The input projection that regenerates `trace` through the machine.
    lasso_word inputs;
};

// nullopt means every trace of m satisfies phi.
std::optional<counterexample> model_check( const moore_machine& m, const formula& phi );

std::string nba_to_dot( const buchi_automaton& a );

// Node ids are dense; succ[v] lists (target, edge tag) pairs in visiting order.
struct search_graph
{
    std::vector<std::vector<std::pair<int, int>>> succ;
    std::vector<bool> accepting;
    std::vector<int> initial;
};

struct accepting_lasso
{
    // Edges as (source, index into succ[source]); the cycle starts and ends
    // at the accepting node where the stem ends.
    std::vector<std::pair<int, int>> stem;
    std::vector<std::pair<int, int>> cycle;
};

// Strongly connected components (iterative Tarjan); returns a component id
// per node.
std::vector<int> scc_ids( const std::vector<std::vector<int>>& succ );

// Iterative nested depth-first search in fixed successor order.
std::optional<accepting_lasso> nested_dfs( const search_graph& g );

} // namespace symsynth
