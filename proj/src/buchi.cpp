#include <symsynth/buchi.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace symsynth
{

buchi_automaton::buchi_automaton( signature sig, std::vector<std::vector<nba_edge>> edges, std::vector<int> initial,
                                  std::vector<bool> accepting )
    : _sig{ std::move( sig ) }, _edges{ std::move( edges ) }, _initial{ std::move( initial ) },
      _accepting{ std::move( accepting ) }
{
    if ( _accepting.size() != _edges.size() )
        throw error( "accepting flags must cover every automaton state" );
    for ( int q : _initial )
        if ( q < 0 || q >= num_states() )
            throw error( "initial automaton state out of range" );
    for ( const auto& list : _edges )
        for ( const auto& e : list )
        {
            if ( e.to < 0 || e.to >= num_states() )
                throw error( "automaton edge target out of range" );
            if ( ( e.guard.pos | e.guard.neg ) & ~_sig.full_mask() )
                throw error( "automaton guard outside the alphabet" );
        }
}

bool buchi_automaton::accepting_sink( int state ) const
{
    if ( !_accepting[ state ] )
        return false;
    for ( const auto& e : _edges[ state ] )
        if ( e.to == state && e.guard.pos == 0 && e.guard.neg == 0 )
            return true;
    return false;
}

namespace
{

enum class nk
{
    tt,
    ff,
    lit,
    and_,
    or_,
    next,
    until,
    release
};

struct nnode
{
    nk kind;
    int bit = -1;
    bool positive = true;
    int a = -1;
    int b = -1;

    auto key() const { return std::tuple( static_cast<int>( kind ), bit, positive, a, b ); }
};

// Hash-consed negation normal form.
class nnf_pool
{
public:
    explicit nnf_pool( const signature& sig ) : _sig{ sig }
    {
        _tt = intern( { nk::tt } );
        _ff = intern( { nk::ff } );
    }

    const nnode& operator[]( int id ) const { return _nodes[ id ]; }
    int size() const { return static_cast<int>( _nodes.size() ); }

    int convert( const formula& f, bool neg )
    {
        switch ( f.kind() )
        {
        case op::tt:
            return neg ? _ff : _tt;
        case op::ff:
            return neg ? _tt : _ff;
        case op::atom:
            return intern( { nk::lit, _sig.bit( f.name(), f.index() ), !neg } );
        case op::not_:
            return convert( f.child(), !neg );
        case op::and_:
            return neg ? mk_or( convert( f.lhs(), true ), convert( f.rhs(), true ) )
                       : mk_and( convert( f.lhs(), false ), convert( f.rhs(), false ) );
        case op::or_:
            return neg ? mk_and( convert( f.lhs(), true ), convert( f.rhs(), true ) )
                       : mk_or( convert( f.lhs(), false ), convert( f.rhs(), false ) );
        case op::implies:
            return neg ? mk_and( convert( f.lhs(), false ), convert( f.rhs(), true ) )
                       : mk_or( convert( f.lhs(), true ), convert( f.rhs(), false ) );
        case op::iff:
        {
            const int a = convert( f.lhs(), false );
            const int na = convert( f.lhs(), true );
            const int b = convert( f.rhs(), false );
            const int nb = convert( f.rhs(), true );
            return neg ? mk_or( mk_and( a, nb ), mk_and( na, b ) ) : mk_or( mk_and( a, b ), mk_and( na, nb ) );
        }
        case op::next:
            return mk_next( convert( f.child(), neg ) );
        case op::finally:
            return neg ? mk_release( _ff, convert( f.child(), true ) ) : mk_until( _tt, convert( f.child(), false ) );
        case op::globally:
            return neg ? mk_until( _tt, convert( f.child(), true ) ) : mk_release( _ff, convert( f.child(), false ) );
        case op::until:
            return neg ? mk_release( convert( f.lhs(), true ), convert( f.rhs(), true ) )
                       : mk_until( convert( f.lhs(), false ), convert( f.rhs(), false ) );
        }
        throw error( "unknown formula kind" );
    }

private:
    int intern( nnode n )
    {
        auto [ it, inserted ] = _ids.try_emplace( n.key(), static_cast<int>( _nodes.size() ) );
        if ( inserted )
            _nodes.push_back( n );
        return it->second;
    }

    int mk_and( int a, int b )
    {
        if ( a == _ff || b == _ff )
            return _ff;
        if ( a == _tt )
            return b;
        if ( b == _tt || a == b )
            return a;
        return intern( { nk::and_, -1, true, std::min( a, b ), std::max( a, b ) } );
    }

    int mk_or( int a, int b )
    {
        if ( a == _tt || b == _tt )
            return _tt;
        if ( a == _ff )
            return b;
        if ( b == _ff || a == b )
            return a;
        return intern( { nk::or_, -1, true, std::min( a, b ), std::max( a, b ) } );
    }

    int mk_next( int a )
    {
        if ( a == _tt || a == _ff )
            return a;
        return intern( { nk::next, -1, true, a } );
    }

    int mk_until( int a, int b )
    {
        if ( b == _tt || b == _ff || a == _ff )
            return b;
        return intern( { nk::until, -1, true, a, b } );
    }

    int mk_release( int a, int b )
    {
        if ( b == _tt || b == _ff || a == _tt )
            return b;
        return intern( { nk::release, -1, true, a, b } );
    }

    const signature& _sig;
    std::vector<nnode> _nodes;
    std::map<std::tuple<int, int, bool, int, int>, int> _ids;
    int _tt;
    int _ff;
};

struct tgba_edge
{
    cube guard;
    int to;
    std::uint64_t acc;
};

class tableau
{
public:
    tableau( const nnf_pool& pool, int root ) : _pool{ pool }
    {
        std::vector<int> stack{ root };
        std::set<int> seen;
        while ( !stack.empty() )
        {
            const int id = stack.back();
            stack.pop_back();
            if ( !seen.insert( id ).second )
                continue;
            const auto& n = _pool[ id ];
            if ( n.kind == nk::until )
                _until_index[ id ] = static_cast<int>( _until_index.size() );
            if ( n.a >= 0 )
                stack.push_back( n.a );
            if ( n.b >= 0 )
                stack.push_back( n.b );
        }
        if ( _until_index.size() > 63 )
            throw error( "formula has too many until subformulas" );
    }

    int untils() const { return static_cast<int>( _until_index.size() ); }

    struct cover
    {
        cube guard;
        std::set<int> next;
        std::uint64_t postponed = 0;
    };

    std::vector<cover> expand( const std::vector<int>& obligations ) const
    {
        std::vector<cover> out;
        std::vector<int> todo( obligations.rbegin(), obligations.rend() );
        expand( std::move( todo ), {}, {}, out );
        return out;
    }

private:
    void expand( std::vector<int> todo, std::set<int> done, cover c, std::vector<cover>& out ) const
    {
        while ( !todo.empty() )
        {
            const int id = todo.back();
            todo.pop_back();
            if ( !done.insert( id ).second )
                continue;
            const auto& n = _pool[ id ];
            switch ( n.kind )
            {
            case nk::tt:
                break;
            case nk::ff:
                return;
            case nk::lit:
            {
                const prop_mask bit = prop_mask{ 1 } << n.bit;
                if ( n.positive )
                {
                    if ( c.guard.neg & bit )
                        return;
                    c.guard.pos |= bit;
                }
                else
                {
                    if ( c.guard.pos & bit )
                        return;
                    c.guard.neg |= bit;
                }
                break;
            }
            case nk::and_:
                todo.push_back( n.b );
                todo.push_back( n.a );
                break;
            case nk::or_:
            {
                auto left = todo;
                left.push_back( n.a );
                expand( std::move( left ), done, c, out );
                todo.push_back( n.b );
                break;
            }
            case nk::next:
                c.next.insert( n.a );
                break;
            case nk::until:
            {
                auto now = todo;
                now.push_back( n.b );
                expand( std::move( now ), done, c, out );
                todo.push_back( n.a );
                c.next.insert( id );
                c.postponed |= std::uint64_t{ 1 } << _until_index.at( id );
                break;
            }
            case nk::release:
            {
                auto now = todo;
                now.push_back( n.b );
                now.push_back( n.a );
                expand( std::move( now ), done, c, out );
                todo.push_back( n.b );
                c.next.insert( id );
                break;
            }
            }
        }
        out.push_back( std::move( c ) );
    }

    const nnf_pool& _pool;
    std::map<int, int> _until_index;
};

} // namespace

std::vector<int> scc_ids( const std::vector<std::vector<int>>& succ )
{
    const int size = static_cast<int>( succ.size() );
    std::vector<int> index( size, -1 ), low( size, 0 ), comp( size, -1 );
    std::vector<bool> on_stack( size, false );
    std::vector<int> stack;
    int counter = 0;
    int comps = 0;
    for ( int root = 0; root < size; ++root )
    {
        if ( index[ root ] >= 0 )
            continue;
        std::vector<std::pair<int, std::size_t>> work{ { root, 0 } };
        index[ root ] = low[ root ] = counter++;
        stack.push_back( root );
        on_stack[ root ] = true;
        while ( !work.empty() )
        {
            auto& [ v, k ] = work.back();
            if ( k < succ[ v ].size() )
            {
                const int w = succ[ v ][ k++ ];
                if ( index[ w ] < 0 )
                {
                    index[ w ] = low[ w ] = counter++;
                    stack.push_back( w );
                    on_stack[ w ] = true;
                    work.emplace_back( w, 0 );
                }
                else if ( on_stack[ w ] )
                    low[ v ] = std::min( low[ v ], index[ w ] );
                continue;
            }
            const int done = v;
            work.pop_back();
            if ( !work.empty() )
                low[ work.back().first ] = std::min( low[ work.back().first ], low[ done ] );
            if ( low[ done ] == index[ done ] )
            {
                int w;
                do
                {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[ w ] = false;
                    comp[ w ] = comps;
                } while ( w != done );
                ++comps;
            }
        }
    }
    return comp;
}

namespace
{

// Removes states that cannot reach an accepting cycle, merges states with
// identical futures, drops subsumed edges and renumbers breadth-first.
buchi_automaton simplify( const signature& sig, std::vector<std::vector<nba_edge>> edges, int initial,
                          std::vector<bool> accepting )
{
    const int size = static_cast<int>( edges.size() );
    std::vector<std::vector<int>> succ( size );
    for ( int q = 0; q < size; ++q )
        for ( const auto& e : edges[ q ] )
            succ[ q ].push_back( e.to );
    const auto comp = scc_ids( succ );
    std::map<int, int> comp_size;
    for ( int c : comp )
        ++comp_size[ c ];
    std::set<int> good_comps;
    for ( int q = 0; q < size; ++q )
    {
        if ( !accepting[ q ] )
            continue;
        const bool cyclic = comp_size[ comp[ q ] ] > 1 || std::count( succ[ q ].begin(), succ[ q ].end(), q ) > 0;
        if ( cyclic )
            good_comps.insert( comp[ q ] );
    }
    std::vector<std::vector<int>> pred( size );
    for ( int q = 0; q < size; ++q )
        for ( int t : succ[ q ] )
            pred[ t ].push_back( q );
    std::vector<bool> live( size, false );
    std::deque<int> queue;
    for ( int q = 0; q < size; ++q )
        if ( good_comps.count( comp[ q ] ) )
        {
            live[ q ] = true;
            queue.push_back( q );
        }
    while ( !queue.empty() )
    {
        const int q = queue.front();
        queue.pop_front();
        for ( int p : pred[ q ] )
            if ( !live[ p ] )
            {
                live[ p ] = true;
                queue.push_back( p );
            }
    }
    if ( !live[ initial ] )
        return buchi_automaton( sig, { {} }, { 0 }, { false } );

    for ( int q = 0; q < size; ++q )
        std::erase_if( edges[ q ], [ & ]( const nba_edge& e ) { return !live[ e.to ]; } );

    // Partition refinement over (accepting, {(guard, block of target)}).
    std::vector<int> block( size, -1 );
    for ( int q = 0; q < size; ++q )
        if ( live[ q ] )
            block[ q ] = accepting[ q ] ? 1 : 0;
    int blocks = 0;
    for ( ;; )
    {
        std::map<std::pair<int, std::set<std::pair<cube, int>>>, int> ids;
        std::vector<int> refined( size, -1 );
        for ( int q = 0; q < size; ++q )
        {
            if ( !live[ q ] )
                continue;
            std::set<std::pair<cube, int>> out;
            for ( const auto& e : edges[ q ] )
                out.emplace( e.guard, block[ e.to ] );
            refined[ q ] = ids.try_emplace( { block[ q ], std::move( out ) }, static_cast<int>( ids.size() ) ).first->second;
        }
        const int count = static_cast<int>( ids.size() );
        block = std::move( refined );
        if ( count == blocks )
            break;
        blocks = count;
    }

    std::vector<int> representative( blocks, -1 );
    for ( int q = 0; q < size; ++q )
        if ( live[ q ] && representative[ block[ q ] ] < 0 )
            representative[ block[ q ] ] = q;
    std::vector<int> id( blocks, -1 );
    std::vector<int> order{ block[ initial ] };
    id[ block[ initial ] ] = 0;
    std::vector<std::vector<nba_edge>> out_edges;
    std::vector<bool> out_accepting;
    for ( std::size_t i = 0; i < order.size(); ++i )
    {
        const int q = representative[ order[ i ] ];
        std::vector<nba_edge> list;
        for ( const auto& e : edges[ q ] )
        {
            const int b = block[ e.to ];
            if ( id[ b ] < 0 )
            {
                id[ b ] = static_cast<int>( order.size() );
                order.push_back( b );
            }
            list.push_back( { e.guard, id[ b ] } );
        }
        std::sort( list.begin(), list.end() );
        list.erase( std::unique( list.begin(), list.end() ), list.end() );
        std::vector<nba_edge> kept;
        for ( std::size_t k = 0; k < list.size(); ++k )
        {
            bool subsumed = false;
            for ( std::size_t m = 0; m < list.size() && !subsumed; ++m )
                subsumed = m != k && list[ m ].to == list[ k ].to && list[ m ].guard.weaker_than( list[ k ].guard ) &&
                           ( list[ m ].guard != list[ k ].guard );
            if ( !subsumed )
                kept.push_back( list[ k ] );
        }
        out_edges.push_back( std::move( kept ) );
        out_accepting.push_back( accepting[ q ] );
    }
    return buchi_automaton( sig, std::move( out_edges ), { 0 }, std::move( out_accepting ) );
}

} // namespace

buchi_automaton ltl_to_nba( const formula& phi, const signature& sig )
{
    check_atoms( phi, sig );
    nnf_pool pool( sig );
    const int root = pool.convert( phi, false );
    const tableau tab( pool, root );
    const int k = tab.untils();
    const std::uint64_t all = ( std::uint64_t{ 1 } << k ) - 1;

    // Generalized automaton over obligation sets.
    std::map<std::vector<int>, int> state_ids;
    std::vector<std::vector<int>> states;
    std::vector<std::vector<tgba_edge>> tgba;
    auto intern = [ & ]( std::vector<int> s ) {
        auto [ it, inserted ] = state_ids.try_emplace( s, static_cast<int>( states.size() ) );
        if ( inserted )
            states.push_back( std::move( s ) );
        return it->second;
    };
    intern( { root } );
    for ( std::size_t i = 0; i < states.size(); ++i )
    {
        std::vector<tgba_edge> list;
        for ( auto& c : tab.expand( states[ i ] ) )
        {
            const int to = intern( std::vector<int>( c.next.begin(), c.next.end() ) );
            list.push_back( { c.guard, to, all & ~c.postponed } );
        }
        // Drop covers dominated by a weaker guard to the same target with
        // at least the same acceptance.
        std::vector<tgba_edge> kept;
        for ( std::size_t a = 0; a < list.size(); ++a )
        {
            bool dominated = false;
            for ( std::size_t b = 0; b < list.size() && !dominated; ++b )
            {
                if ( a == b || list[ a ].to != list[ b ].to )
                    continue;
                const bool covers = list[ b ].guard.weaker_than( list[ a ].guard ) && ( list[ b ].acc & list[ a ].acc ) == list[ a ].acc;
                const bool same = list[ b ].guard == list[ a ].guard && list[ b ].acc == list[ a ].acc;
                dominated = covers && ( !same || b < a );
            }
            if ( !dominated )
                kept.push_back( list[ a ] );
        }
        tgba.push_back( std::move( kept ) );
    }

    // Degeneralize: level j waits for acceptance set j; level k is accepting.
    std::map<std::pair<int, int>, int> ids;
    std::vector<std::pair<int, int>> keys;
    auto intern_level = [ & ]( int q, int level ) {
        auto [ it, inserted ] = ids.try_emplace( { q, level }, static_cast<int>( keys.size() ) );
        if ( inserted )
            keys.emplace_back( q, level );
        return it->second;
    };
    intern_level( 0, 0 );
    std::vector<std::vector<nba_edge>> edges;
    std::vector<bool> accepting;
    for ( std::size_t i = 0; i < keys.size(); ++i )
    {
        const auto [ q, level ] = keys[ i ];
        std::vector<nba_edge> list;
        for ( const auto& e : tgba[ q ] )
        {
            int j = level == k ? 0 : level;
            while ( j < k && ( ( e.acc >> j ) & 1u ) )
                ++j;
            list.push_back( { e.guard, intern_level( e.to, j ) } );
        }
        edges.push_back( std::move( list ) );
        accepting.push_back( level == k );
    }
    return simplify( sig, std::move( edges ), 0, std::move( accepting ) );
}

std::optional<accepting_lasso> nested_dfs( const search_graph& g )
{
    const std::size_t size = g.succ.size();
    std::vector<bool> blue( size, false ), red( size, false );
    struct frame
    {
        int node;
        std::size_t next;
    };
    for ( int start : g.initial )
    {
        if ( blue[ start ] )
            continue;
        std::vector<frame> stack{ { start, 0 } };
        blue[ start ] = true;
        while ( !stack.empty() )
        {
            auto& top = stack.back();
            if ( top.next < g.succ[ top.node ].size() )
            {
                const int w = g.succ[ top.node ][ top.next++ ].first;
                if ( !blue[ w ] )
                {
                    blue[ w ] = true;
                    stack.push_back( { w, 0 } );
                }
                continue;
            }
            const int seed = top.node;
            if ( g.accepting[ seed ] )
            {
                std::vector<frame> inner{ { seed, 0 } };
                while ( !inner.empty() )
                {
                    auto& cur = inner.back();
                    if ( cur.next >= g.succ[ cur.node ].size() )
                    {
                        inner.pop_back();
                        continue;
                    }
                    const int w = g.succ[ cur.node ][ cur.next++ ].first;
                    if ( w == seed )
                    {
                        accepting_lasso out;
                        for ( std::size_t i = 0; i + 1 < stack.size(); ++i )
                            out.stem.emplace_back( stack[ i ].node, static_cast<int>( stack[ i ].next - 1 ) );
                        for ( const auto& f : inner )
                            out.cycle.emplace_back( f.node, static_cast<int>( f.next - 1 ) );
                        return out;
                    }
                    if ( !red[ w ] )
                    {
                        red[ w ] = true;
                        inner.push_back( { w, 0 } );
                    }
                }
            }
            stack.pop_back();
        }
    }
    return std::nullopt;
}

bool nba_accepts_lasso( const buchi_automaton& a, const lasso_word& w )
{
    if ( w.loop.empty() )
        throw error( "lasso loop must be nonempty" );
    for ( std::size_t p = 0; p < w.length(); ++p )
        if ( w.at( p ).bits & ~a.sig().full_mask() )
            throw error( "lasso letter outside the automaton alphabet" );
    const int len = static_cast<int>( w.length() );
    search_graph g;
    g.succ.resize( static_cast<std::size_t>( a.num_states() ) * len );
    g.accepting.resize( g.succ.size() );
    for ( int q = 0; q < a.num_states(); ++q )
        for ( int p = 0; p < len; ++p )
        {
            const int node = q * len + p;
            g.accepting[ node ] = a.accepting( q );
            const int next = static_cast<int>( w.successor( p ) );
            for ( const auto& e : a.edges( q ) )
                if ( e.guard.matches( w.at( p ) ) )
                    g.succ[ node ].emplace_back( e.to * len + next, 0 );
        }
    for ( int q : a.initial() )
        g.initial.push_back( q * len );
    return nested_dfs( g ).has_value();
}

std::optional<counterexample> model_check( const moore_machine& m, const formula& phi )
{
    check_atoms( phi, m.sig() );
    for ( const auto& ref : atoms( phi ) )
        if ( !( ( ( m.inputs() | m.outputs() ) >> m.sig().bit( ref.name, ref.index ) ) & 1u ) )
            throw error( "formula proposition " + ref.name + "@" + std::to_string( ref.index ) +
                         " is neither an input nor an output of the machine" );
    const auto nba = ltl_to_nba( formula::not_( phi ), m.sig() );

    std::map<std::pair<int, int>, int> ids;
    std::vector<std::pair<int, int>> keys;
    auto intern = [ & ]( int s, int q ) {
        auto [ it, inserted ] = ids.try_emplace( { s, q }, static_cast<int>( keys.size() ) );
        if ( inserted )
            keys.emplace_back( s, q );
        return it->second;
    };
    search_graph g;
    for ( int q : nba.initial() )
        g.initial.push_back( intern( m.initial(), q ) );
    for ( std::size_t i = 0; i < keys.size(); ++i )
    {
        const auto [ s, q ] = keys[ i ];
        std::vector<std::pair<int, int>> out;
        for ( int l = 0; l < m.num_letters(); ++l )
        {
            const valuation letter = m.label( s ) | m.letter( l );
            for ( const auto& e : nba.edges( q ) )
                if ( e.guard.matches( letter ) )
                    out.emplace_back( intern( m.next( s, l ), e.to ), l );
        }
        g.succ.push_back( std::move( out ) );
        g.accepting.push_back( nba.accepting( q ) );
    }
    const auto found = nested_dfs( g );
    if ( !found )
        return std::nullopt;
    counterexample cex;
    auto emit = [ & ]( const std::vector<std::pair<int, int>>& path, word& trace, word& inputs ) {
        for ( const auto& [ node, edge ] : path )
        {
            const int letter = g.succ[ node ][ edge ].second;
            inputs.push_back( m.letter( letter ) );
            trace.push_back( m.label( keys[ node ].first ) | m.letter( letter ) );
        }
    };
    emit( found->stem, cex.trace.prefix, cex.inputs.prefix );
    emit( found->cycle, cex.trace.loop, cex.inputs.loop );
    return cex;
}

std::string nba_to_dot( const buchi_automaton& a )
{
    const auto& sig = a.sig();
    auto guard_text = [ & ]( const cube& c ) {
        std::string out;
        for ( int b = 0; b < sig.width(); ++b )
        {
            const bool p = ( c.pos >> b ) & 1u;
            const bool n = ( c.neg >> b ) & 1u;
            if ( !p && !n )
                continue;
            if ( !out.empty() )
                out += " & ";
            out += ( n ? "!" : "" ) + sig.prop_name( b );
        }
        return out.empty() ? std::string( "true" ) : out;
    };
    std::ostringstream out;
    out << "digraph nba {\n  rankdir=LR;\n";
    for ( int q = 0; q < a.num_states(); ++q )
        out << "  q" << q << " [shape=" << ( a.accepting( q ) ? "doublecircle" : "circle" ) << "];\n";
    for ( std::size_t i = 0; i < a.initial().size(); ++i )
        out << "  init" << i << " [shape=point];\n  init" << i << " -> q" << a.initial()[ i ] << ";\n";
    for ( int q = 0; q < a.num_states(); ++q )
        for ( const auto& e : a.edges( q ) )
            out << "  q" << q << " -> q" << e.to << " [label=\"" << guard_text( e.guard ) << "\"];\n";
    out << "}\n";
    return out.str();
}

} // namespace symsynth
