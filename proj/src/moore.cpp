#include <symsynth/moore.hpp>

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <numeric>

namespace symsynth
{

moore_machine::moore_machine( signature sig, prop_mask inputs, prop_mask outputs, bool local_outputs, int initial,
                              std::vector<valuation> labels, std::vector<int> delta )
    : _sig{ std::move( sig ) }, _inputs{ inputs }, _outputs{ outputs }, _local_outputs{ local_outputs },
      _initial{ initial }, _labels{ std::move( labels ) }, _delta{ std::move( delta ) }
{
    if ( inputs & outputs )
        throw error( "machine inputs and outputs overlap" );
    if ( ( inputs | outputs ) & ~_sig.full_mask() )
        throw error( "machine propositions outside the universe" );
    if ( local_outputs && ( outputs & ~_sig.index_mask( 0 ) ) )
        throw error( "local outputs must be index-0 propositions" );
    if ( std::popcount( inputs ) > 16 )
        throw error( "input alphabet too large" );
    _letters = enumerate_letters( inputs );
    if ( _labels.empty() )
        throw error( "machine needs at least one state" );
    if ( initial < 0 || initial >= num_states() )
        throw error( "initial state out of range" );
    if ( _delta.size() != _labels.size() * _letters.size() )
        throw error( "transition table must cover every state and input letter" );
    for ( int t : _delta )
        if ( t < 0 || t >= num_states() )
            throw error( "transition target out of range" );
    for ( auto l : _labels )
        if ( l.bits & ~outputs )
            throw error( "state label uses non-output propositions" );
}

int moore_machine::letter_index( valuation v ) const
{
    if ( v.bits & ~_inputs )
        throw error( "input letter outside the machine's input alphabet" );
    int index = 0;
    int k = 0;
    for ( int b = 0; b < 64; ++b )
    {
        if ( !( ( _inputs >> b ) & 1u ) )
            continue;
        if ( v.contains( b ) )
            index |= 1 << k;
        ++k;
    }
    return index;
}

machine_run run_machine( const moore_machine& m, const word& inputs )
{
    machine_run run;
    int s = m.initial();
    run.states.push_back( s );
    run.outputs.push_back( m.label( s ) );
    for ( auto x : inputs )
    {
        s = m.step( s, x );
        run.states.push_back( s );
        run.outputs.push_back( m.label( s ) );
    }
    return run;
}

lasso_word run_lasso( const moore_machine& m, const lasso_word& inputs )
{
    if ( inputs.loop.empty() )
        throw error( "lasso loop must be nonempty" );
    lasso_word trace;
    int s = m.initial();
    for ( auto x : inputs.prefix )
    {
        trace.prefix.push_back( m.label( s ) | x );
        s = m.step( s, x );
    }
    // Unroll the input loop until it starts in a state seen before.
    std::vector<int> loop_starts;
    word unrolled;
    while ( std::find( loop_starts.begin(), loop_starts.end(), s ) == loop_starts.end() )
    {
        loop_starts.push_back( s );
        for ( auto x : inputs.loop )
        {
            unrolled.push_back( m.label( s ) | x );
            s = m.step( s, x );
        }
    }
    const auto first = static_cast<std::size_t>( std::find( loop_starts.begin(), loop_starts.end(), s ) - loop_starts.begin() );
    const auto cut = static_cast<std::ptrdiff_t>( first * inputs.loop.size() );
    trace.prefix.insert( trace.prefix.end(), unrolled.begin(), unrolled.begin() + cut );
    trace.loop.assign( unrolled.begin() + cut, unrolled.end() );
    return trace;
}

valuation output_after( const moore_machine& m, const word& inputs )
{
    int s = m.initial();
    for ( auto x : inputs )
        s = m.step( s, x );
    return m.label( s );
}

namespace
{

// Breadth-first exploration of a product whose states are keyed by K.
template <typename Key>
class explorer
{
public:
    int intern( const Key& key )
    {
        auto [ it, inserted ] = _ids.try_emplace( key, static_cast<int>( _keys.size() ) );
        if ( inserted )
            _keys.push_back( key );
        return it->second;
    }

    bool pending() const { return _next < _keys.size(); }
    int pop() { return static_cast<int>( _next++ ); }
    const Key& key( int id ) const { return _keys[ id ]; }
    int size() const { return static_cast<int>( _keys.size() ); }

private:
    std::map<Key, int> _ids;
    std::vector<Key> _keys;
    std::size_t _next = 0;
};

} // namespace

moore_machine reachable_part( const moore_machine& m )
{
    std::vector<int> id( m.num_states(), -1 );
    std::vector<int> order{ m.initial() };
    id[ m.initial() ] = 0;
    for ( std::size_t i = 0; i < order.size(); ++i )
        for ( int l = 0; l < m.num_letters(); ++l )
        {
            int t = m.next( order[ i ], l );
            if ( id[ t ] < 0 )
            {
                id[ t ] = static_cast<int>( order.size() );
                order.push_back( t );
            }
        }
    std::vector<valuation> labels;
    std::vector<int> delta;
    for ( int s : order )
    {
        labels.push_back( m.label( s ) );
        for ( int l = 0; l < m.num_letters(); ++l )
            delta.push_back( id[ m.next( s, l ) ] );
    }
    return moore_machine( m.sig(), m.inputs(), m.outputs(), m.local_outputs(), 0, std::move( labels ), std::move( delta ) );
}

moore_machine minimize( const moore_machine& input )
{
    const moore_machine m = reachable_part( input );
    const int states = m.num_states();
    const int letters = m.num_letters();

    std::vector<int> block( states );
    {
        std::map<prop_mask, int> by_label;
        for ( int s = 0; s < states; ++s )
            block[ s ] = by_label.try_emplace( m.label( s ).bits, static_cast<int>( by_label.size() ) ).first->second;
    }
    for ( ;; )
    {
        std::map<std::vector<int>, int> signatures;
        std::vector<int> refined( states );
        for ( int s = 0; s < states; ++s )
        {
            std::vector<int> key{ block[ s ] };
            for ( int l = 0; l < letters; ++l )
                key.push_back( block[ m.next( s, l ) ] );
            refined[ s ] = signatures.try_emplace( std::move( key ), static_cast<int>( signatures.size() ) ).first->second;
        }
        const bool stable = signatures.size() == static_cast<std::size_t>( *std::max_element( block.begin(), block.end() ) + 1 );
        block = std::move( refined );
        if ( stable )
            break;
    }

    // Renumber blocks in breadth-first order from the initial state.
    const int blocks = *std::max_element( block.begin(), block.end() ) + 1;
    std::vector<int> representative( blocks, -1 );
    for ( int s = 0; s < states; ++s )
        if ( representative[ block[ s ] ] < 0 )
            representative[ block[ s ] ] = s;
    std::vector<int> id( blocks, -1 );
    std::vector<int> order{ block[ 0 ] };
    id[ block[ 0 ] ] = 0;
    for ( std::size_t i = 0; i < order.size(); ++i )
        for ( int l = 0; l < letters; ++l )
        {
            int t = block[ m.next( representative[ order[ i ] ], l ) ];
            if ( id[ t ] < 0 )
            {
                id[ t ] = static_cast<int>( order.size() );
                order.push_back( t );
            }
        }
    std::vector<valuation> labels;
    std::vector<int> delta;
    for ( int b : order )
    {
        labels.push_back( m.label( representative[ b ] ) );
        for ( int l = 0; l < letters; ++l )
            delta.push_back( id[ block[ m.next( representative[ b ], l ) ] ] );
    }
    return moore_machine( m.sig(), m.inputs(), m.outputs(), m.local_outputs(), 0, std::move( labels ), std::move( delta ) );
}

bool bisim_equiv( const moore_machine& a, const moore_machine& b )
{
    if ( a.sig() != b.sig() || a.inputs() != b.inputs() || a.outputs() != b.outputs() )
        throw error( "bisimulation check needs identical alphabets" );
    std::vector<char> seen( static_cast<std::size_t>( a.num_states() ) * b.num_states(), 0 );
    std::deque<std::pair<int, int>> queue{ { a.initial(), b.initial() } };
    seen[ static_cast<std::size_t>( a.initial() ) * b.num_states() + b.initial() ] = 1;
    while ( !queue.empty() )
    {
        auto [ s, t ] = queue.front();
        queue.pop_front();
        if ( a.label( s ) != b.label( t ) )
            return false;
        for ( int l = 0; l < a.num_letters(); ++l )
        {
            const int s2 = a.next( s, l );
            const int t2 = b.next( t, l );
            auto& flag = seen[ static_cast<std::size_t>( s2 ) * b.num_states() + t2 ];
            if ( !flag )
            {
                flag = 1;
                queue.emplace_back( s2, t2 );
            }
        }
    }
    return true;
}

moore_machine symmetric_product( const moore_machine& p, int n )
{
    const auto& sig = p.sig();
    if ( !p.local_outputs() )
        throw error( "symmetric product needs a process machine with local outputs" );
    if ( sig.processes() != n )
        throw error( "process machine is built for n=" + std::to_string( sig.processes() ) + ", not n=" + std::to_string( n ) );
    if ( rot( sig, valuation{ p.inputs() }, 1 ).bits != p.inputs() )
        throw error( "process must read the full rotated input alphabet" );

    prop_mask outputs = 0;
    for ( int j = 0; j < n; ++j )
        outputs |= rot( sig, valuation{ p.outputs() }, j ).bits;

    // rotated[j][l] = letter index of rot(letter l, -j)
    std::vector<std::vector<int>> rotated( n, std::vector<int>( p.num_letters() ) );
    for ( int j = 0; j < n; ++j )
        for ( int l = 0; l < p.num_letters(); ++l )
            rotated[ j ][ l ] = p.letter_index( rot( sig, p.letter( l ), -j ) );

    explorer<std::vector<int>> states;
    states.intern( std::vector<int>( n, p.initial() ) );
    std::vector<valuation> labels;
    std::vector<int> delta;
    while ( states.pending() )
    {
        const int id = states.pop();
        const std::vector<int> tuple = states.key( id );
        valuation label;
        for ( int j = 0; j < n; ++j )
            label = label | rot( sig, p.label( tuple[ j ] ), j );
        labels.push_back( label );
        for ( int l = 0; l < p.num_letters(); ++l )
        {
            std::vector<int> succ( n );
            for ( int j = 0; j < n; ++j )
                succ[ j ] = p.next( tuple[ j ], rotated[ j ][ l ] );
            delta.push_back( states.intern( succ ) );
        }
    }
    return moore_machine( sig, p.inputs(), outputs, false, 0, std::move( labels ), std::move( delta ) );
}

moore_machine aggregate_machine( const moore_machine& p, const symmetric_wiring& w )
{
    validate( w );
    if ( p.sig() != w.process_sig || p.inputs() != w.process_inputs || p.outputs() != w.process_outputs )
        throw error( "process machine does not match the architecture's process interface" );

    const auto letters = enumerate_letters( w.global_inputs );
    explorer<std::vector<int>> states;
    states.intern( std::vector<int>( w.process_count, p.initial() ) );
    std::vector<valuation> labels;
    std::vector<int> delta;

    auto signal_values = [ & ]( const std::vector<int>& f ) {
        valuation out;
        for ( const auto& [ edge, target ] : w.output_edges )
            if ( p.label( f[ edge.first ] ).contains( edge.second ) )
                out.bits |= prop_mask{ 1 } << target;
        return out;
    };

    while ( states.pending() )
    {
        const int id = states.pop();
        const std::vector<int> f = states.key( id );
        const valuation current = signal_values( f );
        labels.push_back( current );
        for ( auto x : letters )
        {
            const valuation visible = x | current;
            std::vector<valuation> local( w.process_count );
            for ( const auto& [ edge, source ] : w.input_edges )
                if ( visible.contains( source ) )
                    local[ edge.first ].bits |= prop_mask{ 1 } << edge.second;
            std::vector<int> succ( w.process_count );
            for ( int q = 0; q < w.process_count; ++q )
                succ[ q ] = p.step( f[ q ], local[ q ] );
            delta.push_back( states.intern( succ ) );
        }
    }
    return moore_machine( w.global_sig, w.global_inputs, w.signals, false, 0, std::move( labels ), std::move( delta ) );
}

moore_machine extract_process( const moore_machine& g )
{
    const prop_mask local = g.outputs() & g.sig().index_mask( 0 );
    if ( g.local_outputs() )
        throw error( "machine already has local outputs" );
    std::vector<valuation> labels;
    for ( auto l : g.labels() )
        labels.push_back( l & local );
    return minimize( moore_machine( g.sig(), g.inputs(), local, true, g.initial(), std::move( labels ), g.delta() ) );
}

namespace
{

word trace_back( const std::vector<std::pair<int, int>>& parent, int node, const std::vector<valuation>& letters )
{
    word out;
    while ( parent[ node ].first >= 0 )
    {
        out.push_back( letters[ parent[ node ].second ] );
        node = parent[ node ].first;
    }
    std::reverse( out.begin(), out.end() );
    return out;
}

} // namespace

std::optional<symmetry_violation> symmetry_check( const moore_machine& g, int n )
{
    const auto& sig = g.sig();
    if ( sig.processes() != n )
        throw error( "machine is built for n=" + std::to_string( sig.processes() ) );
    for ( int i = 1; i < n; ++i )
    {
        std::vector<int> rotated( g.num_letters() );
        for ( int l = 0; l < g.num_letters(); ++l )
            rotated[ l ] = g.letter_index( rot( sig, g.letter( l ), i ) );

        explorer<std::pair<int, int>> pairs;
        std::vector<std::pair<int, int>> parent{ { -1, -1 } };
        pairs.intern( { g.initial(), g.initial() } );
        while ( pairs.pending() )
        {
            const int id = pairs.pop();
            const auto [ s, t ] = pairs.key( id );
            if ( g.label( t ) != rot( sig, g.label( s ), i ) )
                return symmetry_violation{ trace_back( parent, id, g.letters() ), i };
            for ( int l = 0; l < g.num_letters(); ++l )
            {
                const int before = pairs.size();
                const int next = pairs.intern( { g.next( s, l ), g.next( t, rotated[ l ] ) } );
                if ( next == before )
                    parent.emplace_back( id, l );
            }
        }
    }
    return std::nullopt;
}

std::optional<word> reps_divisibility_check( const moore_machine& g, int n )
{
    const auto& sig = g.sig();
    if ( sig.processes() != n )
        throw error( "machine is built for n=" + std::to_string( sig.processes() ) );
    std::vector<int> letter_rep( g.num_letters() );
    for ( int l = 0; l < g.num_letters(); ++l )
        letter_rep[ l ] = rep( sig, g.letter( l ) );

    explorer<std::pair<int, int>> nodes;
    std::vector<std::pair<int, int>> parent{ { -1, -1 } };
    nodes.intern( { g.initial(), n } );
    while ( nodes.pending() )
    {
        const int id = nodes.pop();
        const auto [ s, r ] = nodes.key( id );
        if ( rep( sig, g.label( s ) ) % r != 0 )
            return trace_back( parent, id, g.letters() );
        for ( int l = 0; l < g.num_letters(); ++l )
        {
            const int before = nodes.size();
            const int next = nodes.intern( { g.next( s, l ), std::gcd( r, letter_rep[ l ] ) } );
            if ( next == before )
                parent.emplace_back( id, l );
        }
    }
    return std::nullopt;
}

moore_machine symmetric_completion( const moore_machine& g, int n )
{
    if ( auto witness = reps_divisibility_check( g, n ) )
        throw completion_error( "machine violates reps(t) | rep(tau(t)) on input " + format_word( g.sig(), *witness ),
                                *witness );
    const auto& sig = g.sig();
    std::vector<std::vector<int>> rotated( n, std::vector<int>( g.num_letters() ) );
    for ( int j = 0; j < n; ++j )
        for ( int l = 0; l < g.num_letters(); ++l )
            rotated[ j ][ l ] = g.letter_index( rot( sig, g.letter( l ), j ) );

    // A state is (state of g after the minimal rotation eta(t), set of shifts
    // i with rot(t, i) = eta(t)). Every shift in the set has consumed the same
    // rotated word, so one g state suffices.
    using key = std::pair<int, unsigned>;
    explorer<key> states;
    states.intern( { g.initial(), ( 1u << n ) - 1 } );
    std::vector<valuation> labels;
    std::vector<int> delta;
    while ( states.pending() )
    {
        const int id = states.pop();
        const auto [ s, shifts ] = states.key( id );
        const int smallest = std::countr_zero( shifts );
        labels.push_back( rot( sig, g.label( s ), -smallest ) );
        for ( int l = 0; l < g.num_letters(); ++l )
        {
            unsigned best_set = 0;
            int best_letter = -1;
            for ( int j = 0; j < n; ++j )
            {
                if ( !( ( shifts >> j ) & 1u ) )
                    continue;
                const int candidate = rotated[ j ][ l ];
                const auto order = best_letter < 0 ? std::strong_ordering::less
                                                   : compare_valuations( g.letter( candidate ), g.letter( best_letter ) );
                if ( order < 0 )
                {
                    best_letter = candidate;
                    best_set = 1u << j;
                }
                else if ( order == 0 )
                    best_set |= 1u << j;
            }
            delta.push_back( states.intern( { g.next( s, best_letter ), best_set } ) );
        }
    }
    return minimize( moore_machine( sig, g.inputs(), g.outputs(), false, 0, std::move( labels ), std::move( delta ) ) );
}

moore_machine rename_outputs( const moore_machine& m, const std::vector<int>& map )
{
    auto rename = [ & ]( prop_mask bits ) {
        prop_mask out = 0;
        for ( int b = 0; b < 64; ++b )
            if ( ( bits >> b ) & 1u )
                out |= prop_mask{ 1 } << map.at( b );
        return out;
    };
    std::vector<valuation> labels;
    for ( auto l : m.labels() )
        labels.push_back( { rename( l.bits ) } );
    return moore_machine( m.sig(), m.inputs(), rename( m.outputs() ), m.local_outputs(), m.initial(), std::move( labels ),
                          m.delta() );
}

moore_machine rebind( const moore_machine& m, const signature& target )
{
    if ( m.sig() == target )
        return m;
    const auto& from = m.sig();
    auto translate = [ & ]( prop_mask bits ) {
        prop_mask out = 0;
        for ( int b = 0; b < from.width(); ++b )
            if ( ( bits >> b ) & 1u )
                out |= prop_mask{ 1 } << target.bit( from.names()[ from.position_of_bit( b ) ], from.index_of_bit( b ) );
        return out;
    };
    const prop_mask inputs = translate( m.inputs() );
    const auto target_letters = enumerate_letters( inputs );
    // Letter numbering depends on bit order, so transitions are re-indexed.
    std::vector<int> source_letter( target_letters.size() );
    for ( int l = 0; l < m.num_letters(); ++l )
    {
        const prop_mask t = translate( m.letter( l ).bits );
        const auto it = std::find( target_letters.begin(), target_letters.end(), valuation{ t } );
        source_letter[ it - target_letters.begin() ] = l;
    }
    std::vector<valuation> labels;
    std::vector<int> delta;
    for ( int s = 0; s < m.num_states(); ++s )
    {
        labels.push_back( { translate( m.label( s ).bits ) } );
        for ( std::size_t l = 0; l < target_letters.size(); ++l )
            delta.push_back( m.next( s, source_letter[ l ] ) );
    }
    return moore_machine( target, inputs, translate( m.outputs() ), m.local_outputs(), m.initial(), std::move( labels ),
                          std::move( delta ) );
}

} // namespace symsynth
