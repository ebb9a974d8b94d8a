#pragma once

#include <symsynth/architecture.hpp>
#include <symsynth/formula.hpp>
#include <symsynth/moore.hpp>
#include <symsynth/valuation.hpp>

#include <bit>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace symsynth::testing
{

using rng = std::mt19937_64;

inline constexpr std::uint64_t default_seed = 20240611;

inline int uniform( rng& r, int lo, int hi )
{
    return std::uniform_int_distribution<int>( lo, hi )( r );
}

inline valuation random_subset( rng& r, prop_mask mask )
{
    valuation v;
    for ( prop_mask rest = mask; rest; rest &= rest - 1 )
        if ( r() & 1u )
            v.bits |= rest & -rest;
    return v;
}

inline word random_word( rng& r, prop_mask mask, int length )
{
    word w;
    for ( int i = 0; i < length; ++i )
        w.push_back( random_subset( r, mask ) );
    return w;
}

inline lasso_word random_lasso( rng& r, prop_mask mask, int max_prefix, int max_loop )
{
    return { random_word( r, mask, uniform( r, 0, max_prefix ) ), random_word( r, mask, uniform( r, 1, max_loop ) ) };
}

// Random formula with exactly `size` nodes over the bits of `mask`.
inline formula random_formula( rng& r, const signature& sig, prop_mask mask, int size, bool with_fg = true )
{
    std::vector<int> bits;
    for ( int b = 0; b < sig.width(); ++b )
        if ( ( mask >> b ) & 1u )
            bits.push_back( b );
    if ( size <= 1 )
    {
        if ( bits.empty() || uniform( r, 0, 9 ) == 0 )
            return uniform( r, 0, 1 ) ? formula::tt() : formula::ff();
        const int b = bits[ static_cast<std::size_t>( uniform( r, 0, static_cast<int>( bits.size() ) - 1 ) ) ];
        return formula::atom( sig.names()[ static_cast<std::size_t>( sig.position_of_bit( b ) ) ], sig.index_of_bit( b ) );
    }
    const bool unary = size == 2 || uniform( r, 0, 2 ) == 0;
    if ( unary )
    {
        formula a = random_formula( r, sig, mask, size - 1, with_fg );
        switch ( uniform( r, 0, with_fg ? 3 : 1 ) )
        {
        case 0:
            return formula::not_( a );
        case 1:
            return formula::next( a );
        case 2:
            return formula::finally( a );
        default:
            return formula::globally( a );
        }
    }
    const int left = uniform( r, 1, size - 2 );
    formula a = random_formula( r, sig, mask, left, with_fg );
    formula b = random_formula( r, sig, mask, size - 1 - left, with_fg );
    switch ( uniform( r, 0, 4 ) )
    {
    case 0:
        return formula::and_( a, b );
    case 1:
        return formula::or_( a, b );
    case 2:
        return formula::implies( a, b );
    case 3:
        return formula::iff( a, b );
    default:
        return formula::until( a, b );
    }
}

inline moore_machine random_machine( rng& r, const signature& sig, prop_mask inputs, prop_mask outputs, bool local_outputs,
                                     int states )
{
    const int letters = 1 << std::popcount( inputs );
    const prop_mask label_mask = local_outputs ? outputs & sig.index_mask( 0 ) : outputs;
    std::vector<valuation> labels;
    for ( int s = 0; s < states; ++s )
        labels.push_back( random_subset( r, label_mask ) );
    std::vector<int> delta;
    for ( int i = 0; i < states * letters; ++i )
        delta.push_back( uniform( r, 0, states - 1 ) );
    return moore_machine( sig, inputs, outputs, local_outputs, 0, labels, delta );
}

inline moore_machine random_process( rng& r, const architecture& arch, int states )
{
    return random_machine( r, arch.sig(), arch.input_mask(), arch.local_output_mask(), true, states );
}

inline moore_machine random_global( rng& r, const architecture& arch, int states )
{
    return random_machine( r, arch.sig(), arch.input_mask(), arch.output_mask(), false, states );
}

// Makes every label invariant under the rotations that the divisibility
// condition demands at that state, so the result passes
// reps_divisibility_check. Labels grow to the union of their rotations.
inline moore_machine symmetrize_labels( const moore_machine& g, int n )
{
    const signature& sig = g.sig();
    std::vector<int> needed( static_cast<std::size_t>( g.num_states() ), 1 );
    std::set<std::pair<int, int>> seen{ { g.initial(), n } };
    std::vector<std::pair<int, int>> stack{ { g.initial(), n } };
    while ( !stack.empty() )
    {
        auto [ s, r ] = stack.back();
        stack.pop_back();
        needed[ static_cast<std::size_t>( s ) ] = std::lcm( needed[ static_cast<std::size_t>( s ) ], r );
        for ( int l = 0; l < g.num_letters(); ++l )
        {
            std::pair<int, int> next{ g.next( s, l ), reps_extend( sig, r, g.letter( l ) ) };
            if ( seen.insert( next ).second )
                stack.push_back( next );
        }
    }
    std::vector<valuation> labels = g.labels();
    for ( int s = 0; s < g.num_states(); ++s )
    {
        const int m = needed[ static_cast<std::size_t>( s ) ];
        valuation closed;
        for ( int t = 0; t < m; ++t )
            closed = closed | rot( sig, labels[ static_cast<std::size_t>( s ) ], t * ( n / m ) );
        labels[ static_cast<std::size_t>( s ) ] = closed;
    }
    return moore_machine( sig, g.inputs(), g.outputs(), false, g.initial(), labels, g.delta() );
}

// All words of exactly `length` letters over the bits of `mask`.
inline std::vector<word> all_words( prop_mask mask, int length )
{
    std::vector<word> out{ word{} };
    const auto letters = enumerate_letters( mask );
    for ( int i = 0; i < length; ++i )
    {
        std::vector<word> longer;
        for ( const auto& w : out )
            for ( auto x : letters )
            {
                longer.push_back( w );
                longer.back().push_back( x );
            }
        out = std::move( longer );
    }
    return out;
}

inline int neutral_rotations( const signature& sig, const word& w )
{
    int count = 0;
    for ( int j = 0; j < sig.processes(); ++j )
        count += rot( sig, w, j ) == w;
    return count;
}

// Completion labels computed straight from the definition: rotate the input
// word to its minimum, read g there, rotate back.
inline valuation completion_oracle( const moore_machine& g, const word& t )
{
    const auto& sig = g.sig();
    const int n = sig.processes();
    word best = t;
    int shift = 0;
    for ( int i = 1; i < n; ++i )
    {
        word candidate = rot( sig, t, i );
        if ( compare_words( candidate, best ) < 0 )
        {
            best = candidate;
            shift = i;
        }
    }
    return rot( sig, output_after( g, best ), -shift );
}

} // namespace symsynth::testing
