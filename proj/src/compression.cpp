#include <symsynth/compression.hpp>

#include <algorithm>

namespace symsynth
{

compression_scheme::compression_scheme( std::vector<std::string> signals, std::string carrier )
    : _signals{ std::move( signals ) }, _carrier{ std::move( carrier ) }
{
    if ( _signals.empty() )
        throw error( "compression needs at least one signal" );
    _source = signature( _signals, 1 );
    _target = signature( { _carrier }, 1 );
}

namespace
{

void expand_letter( valuation letter, const compression_scheme& s, word& out )
{
    const int n = static_cast<int>( s.signals().size() );
    if ( letter.bits & ~s.source_sig().full_mask() )
        throw error( "letter uses propositions outside the signal list" );
    const valuation on{ 1 };
    const valuation off{ 0 };
    out.push_back( on );
    out.push_back( on );
    for ( int j = 0; j < n; ++j )
    {
        out.push_back( off );
        out.push_back( letter.contains( j ) ? on : off );
    }
}

word read_blocks( const word& w, const compression_scheme& s )
{
    const std::size_t block = s.block_length();
    if ( w.size() % block != 0 )
        throw error( "compressed word is not block aligned" );
    word out;
    for ( std::size_t start = 0; start < w.size(); start += block )
    {
        if ( !w[ start ].contains( 0 ) || !w[ start + 1 ].contains( 0 ) )
            throw error( "block at position " + std::to_string( start ) + " lacks the start marker" );
        valuation letter;
        for ( std::size_t j = 0; j < s.signals().size(); ++j )
        {
            if ( w[ start + 2 * j + 2 ].bits != 0 )
                throw error( "even slot set at position " + std::to_string( start + 2 * j + 2 ) );
            if ( w[ start + 2 * j + 3 ].contains( 0 ) )
                letter.bits |= prop_mask{ 1 } << j;
        }
        out.push_back( letter );
    }
    return out;
}

} // namespace

word compress_word( const word& w, const compression_scheme& s )
{
    word out;
    for ( auto letter : w )
        expand_letter( letter, s, out );
    return out;
}

lasso_word compress_word( const lasso_word& w, const compression_scheme& s )
{
    return { compress_word( w.prefix, s ), compress_word( w.loop, s ) };
}

lasso_word decompress_word( const lasso_word& w, const compression_scheme& s )
{
    return { read_blocks( w.prefix, s ), read_blocks( w.loop, s ) };
}

formula reduce_to_until( const formula& psi )
{
    switch ( psi.kind() )
    {
    case op::tt:
    case op::ff:
    case op::atom:
        return psi;
    case op::not_:
        return formula::not_( reduce_to_until( psi.child() ) );
    case op::next:
        return formula::next( reduce_to_until( psi.child() ) );
    case op::finally:
        return formula::until( formula::tt(), reduce_to_until( psi.child() ) );
    case op::globally:
        return formula::not_( formula::until( formula::tt(), formula::not_( reduce_to_until( psi.child() ) ) ) );
    case op::and_:
        return formula::and_( reduce_to_until( psi.lhs() ), reduce_to_until( psi.rhs() ) );
    case op::or_:
        return formula::or_( reduce_to_until( psi.lhs() ), reduce_to_until( psi.rhs() ) );
    case op::implies:
        return formula::implies( reduce_to_until( psi.lhs() ), reduce_to_until( psi.rhs() ) );
    case op::iff:
        return formula::iff( reduce_to_until( psi.lhs() ), reduce_to_until( psi.rhs() ) );
    case op::until:
        return formula::until( reduce_to_until( psi.lhs() ), reduce_to_until( psi.rhs() ) );
    }
    throw error( "unknown formula kind" );
}

formula start_marker( const std::string& p )
{
    const formula a = formula::atom( p, 0 );
    return conjunction( { a, formula::next( a ), next_n( formula::not_( a ), 2 ) } );
}

formula compress_formula( const formula& psi, const compression_scheme& s )
{
    const int block = s.block_length();
    const formula carrier = formula::atom( s.carrier(), 0 );
    auto rec = [ & ]( auto&& self, const formula& f ) -> formula {
        switch ( f.kind() )
        {
        case op::tt:
        case op::ff:
            return f;
        case op::atom:
        {
            const auto& names = s.signals();
            const auto it = std::find( names.begin(), names.end(), f.name() );
            if ( it == names.end() || f.index() != 0 )
                throw error( "proposition " + f.name() + "@" + std::to_string( f.index() ) + " is not a signal" );
            const int j = static_cast<int>( it - names.begin() ) + 1;
            return next_n( carrier, 2 * j + 1 );
        }
        case op::not_:
            return formula::not_( self( self, f.child() ) );
        case op::next:
            return next_n( self( self, f.child() ), block );
        case op::and_:
            return formula::and_( self( self, f.lhs() ), self( self, f.rhs() ) );
        case op::or_:
            return formula::or_( self( self, f.lhs() ), self( self, f.rhs() ) );
        case op::implies:
            return formula::implies( self( self, f.lhs() ), self( self, f.rhs() ) );
        case op::iff:
            return formula::iff( self( self, f.lhs() ), self( self, f.rhs() ) );
        case op::until:
        {
            const formula marker = start_marker( s.carrier() );
            return formula::until( formula::implies( marker, self( self, f.lhs() ) ),
                                   formula::and_( marker, self( self, f.rhs() ) ) );
        }
        case op::finally:
        case op::globally:
            throw error( "compress_formula expects F and G to be rewritten with U first" );
        }
        throw error( "unknown formula kind" );
    };
    return rec( rec, psi );
}

validity_formulas make_validity_formulas( const compression_scheme& s )
{
    const int n = static_cast<int>( s.signals().size() );
    const int block = s.block_length();
    const formula c = formula::atom( s.carrier(), 0 );
    std::vector<formula> broken{ formula::not_( next_n( c, block ) ), formula::not_( next_n( c, block + 1 ) ),
                                 next_n( c, block + 2 ) };
    for ( int i = 1; i <= n; ++i )
        broken.push_back( next_n( c, 2 * i ) );
    validity_formulas out{
        formula::and_( start_marker( s.carrier() ), disjunction( broken ) ),
        disjunction( { formula::not_( c ), formula::not_( formula::next( c ) ), next_n( c, 2 ) } ),
        correct_formula( s, s.carrier() ),
    };
    return out;
}

formula correct_formula( const compression_scheme& s, const std::string& p )
{
    const int n = static_cast<int>( s.signals().size() );
    const int block = s.block_length();
    const formula a = formula::atom( p, 0 );
    std::vector<formula> next_block;
    for ( int i = 1; i <= n; ++i )
        next_block.push_back( formula::not_( next_n( a, 2 * i ) ) );
    next_block.push_back( next_n( a, block ) );
    next_block.push_back( next_n( a, block + 1 ) );
    next_block.push_back( next_n( formula::not_( a ), block + 2 ) );
    const formula step = disjunction(
        { formula::not_( a ), formula::not_( formula::next( a ) ), next_n( a, 2 ), conjunction( next_block ) } );
    return formula::and_( start_marker( p ), formula::globally( step ) );
}

} // namespace symsynth
