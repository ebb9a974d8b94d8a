#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace symsynth;
using namespace symsynth::testing;

namespace
{

valuation v( const signature& sig, std::initializer_list<raw_prop> props )
{
    return resolve( sig, raw_valuation( props ) );
}

// One proposition, tuple (x0, ..., x_{n-1}) written as a bit string.
valuation tuple( const signature& sig, const std::string& bits )
{
    valuation out;
    for ( std::size_t j = 0; j < bits.size(); ++j )
        if ( bits[ j ] == '1' )
            out.bits |= prop_mask{ 1 } << sig.bit( 0, static_cast<int>( j ) );
    return out;
}

} // namespace

TEST_CASE( "signature layout is process major" )
{
    signature sig( { "r", "g" }, 3 );
    CHECK( sig.width() == 6 );
    CHECK( sig.bit( "r", 0 ) == 0 );
    CHECK( sig.bit( "g", 0 ) == 1 );
    CHECK( sig.bit( "r", 2 ) == 4 );
    CHECK( sig.prop_name( 5 ) == "g@2" );
    CHECK_THROWS_AS( sig.bit( "q", 0 ), error );
    CHECK_THROWS_AS( sig.bit( "r", 3 ), error );
    CHECK( sig.index_mask( 1 ) == 0b001100 );
    CHECK( sig.name_mask( 1 ) == 0b101010 );
}

TEST_CASE( "rotation of valuations" )
{
    signature sig( { "a", "b" }, 3 );
    CHECK( rot( sig, v( sig, { { "a", 0 }, { "b", 2 } } ), 1 ) == v( sig, { { "a", 1 }, { "b", 0 } } ) );
    const auto x = v( sig, { { "a", 0 }, { "b", 1 } } );
    CHECK( rot( sig, x, 0 ) == x );
    CHECK( rot( sig, x, 3 ) == x );
    CHECK( rot( sig, x, -1 ) == rot( sig, x, 2 ) );
    CHECK( rot( sig, x, -13 ) == rot( sig, x, 2 ) );
    const auto all = v( sig, { { "a", 0 }, { "a", 1 }, { "a", 2 } } );
    CHECK( rot( sig, all, 2 ) == all );

    rng r( default_seed );
    for ( int i = 0; i < 200; ++i )
    {
        const auto y = random_subset( r, sig.full_mask() );
        const int j = uniform( r, -5, 5 ), k = uniform( r, -5, 5 );
        CHECK( rot( sig, rot( sig, y, j ), k ) == rot( sig, y, j + k ) );
        CHECK( std::popcount( rot( sig, y, j ).bits ) == std::popcount( y.bits ) );
    }
}

TEST_CASE( "rotation of words" )
{
    signature sig( { "x" }, 2 );
    CHECK( rot( sig, word{}, 1 ).empty() );
    CHECK( rot( sig, word{ tuple( sig, "10" ) }, 1 ) == word{ tuple( sig, "01" ) } );
    rng r( default_seed );
    for ( int i = 0; i < 100; ++i )
    {
        signature s3( { "x", "y" }, 3 );
        const auto w = random_word( r, s3.full_mask(), uniform( r, 0, 6 ) );
        const int k = uniform( r, 0, 2 );
        CHECK( rot( s3, rot( s3, w, k ), 3 - k ) == w );
    }
}

TEST_CASE( "tuple order" )
{
    signature sig( { "x" }, 3 );
    CHECK( compare_valuations( tuple( sig, "010" ), tuple( sig, "011" ) ) < 0 );
    CHECK( compare_valuations( tuple( sig, "010" ), tuple( sig, "100" ) ) < 0 );
    CHECK( compare_valuations( tuple( sig, "110" ), tuple( sig, "110" ) ) == 0 );
    CHECK( compare_valuations( tuple( sig, "000" ), tuple( sig, "001" ) ) < 0 );

    // Brute force against the tuple read as a binary string, x0 most significant.
    signature s4( { "x" }, 4 );
    auto as_number = [ & ]( valuation a ) {
        int value = 0;
        for ( int j = 0; j < 4; ++j )
            value = value * 2 + static_cast<int>( a.contains( s4.bit( 0, j ) ) );
        return value;
    };
    for ( auto a : enumerate_letters( s4.full_mask() ) )
        for ( auto b : enumerate_letters( s4.full_mask() ) )
            CHECK( compare_valuations( a, b ) == ( as_number( a ) <=> as_number( b ) ) );
}

TEST_CASE( "normalization" )
{
    signature sig( { "x" }, 2 );
    auto eps = normalize_word( sig, {} );
    CHECK( eps.normalized.empty() );
    CHECK( eps.shift == 0 );

    auto one = normalize_word( sig, { tuple( sig, "10" ) } );
    CHECK( one.normalized == word{ tuple( sig, "01" ) } );
    CHECK( one.shift == 1 );

    auto fixed = normalize_word( sig, { tuple( sig, "01" ), tuple( sig, "11" ) } );
    CHECK( fixed.shift == 0 );

    rng r( default_seed );
    for ( int n : { 2, 3, 4 } )
    {
        signature s( { "x", "y" }, n );
        for ( int i = 0; i < 100; ++i )
        {
            const auto t = random_word( r, s.full_mask(), uniform( r, 0, 4 ) );
            const auto eta = normalize_word( s, t );
            CHECK( rot( s, t, eta.shift ) == eta.normalized );
            for ( int k = 0; k < n; ++k )
            {
                CHECK( compare_words( eta.normalized, rot( s, t, k ) ) <= 0 );
                CHECK( normalize_word( s, rot( s, t, k ) ).normalized == eta.normalized );
            }
            for ( int k = 0; k < eta.shift; ++k )
                CHECK( rot( s, t, k ) != eta.normalized );
        }
    }
}

TEST_CASE( "rep and reps" )
{
    signature sig( { "a" }, 4 );
    CHECK( rep( sig, {} ) == 4 );
    CHECK( rep( sig, v( sig, { { "a", 0 }, { "a", 2 } } ) ) == 2 );
    CHECK( rep( sig, v( sig, { { "a", 1 } } ) ) == 1 );
    CHECK( reps( sig, {} ) == 4 );
    CHECK( reps( sig, { v( sig, { { "a", 0 }, { "a", 2 } } ) } ) == 2 );
    CHECK( reps( sig, { v( sig, { { "a", 0 }, { "a", 2 } } ), v( sig, { { "a", 1 } } ) } ) == 1 );

    for ( int n : { 2, 3, 4, 6 } )
    {
        signature s( { "a" }, n );
        for ( auto x : enumerate_letters( s.full_mask() ) )
        {
            const int m = rep( s, x );
            CHECK( n % m == 0 );
            for ( int j = 0; j < n; ++j )
                CHECK( ( rot( s, x, j ) == x ) == ( j % ( n / m ) == 0 ) );
        }
        for ( int length = 0; length <= ( n == 6 ? 3 : 4 ); ++length )
            for ( const auto& w : all_words( s.full_mask(), length ) )
            {
                const int count = reps( s, w );
                CHECK( count == neutral_rotations( s, w ) );
                for ( auto x : enumerate_letters( s.full_mask() ) )
                    CHECK( count % reps_extend( s, count, x ) == 0 );
            }
    }
}

TEST_CASE( "letters enumerate subsets in packed order" )
{
    const auto letters = enumerate_letters( 0b1010 );
    REQUIRE( letters.size() == 4 );
    CHECK( letters[ 0 ].bits == 0 );
    CHECK( letters[ 1 ].bits == 0b0010 );
    CHECK( letters[ 2 ].bits == 0b1000 );
    CHECK( letters[ 3 ].bits == 0b1010 );
}

TEST_CASE( "text syntax" )
{
    signature sig( { "r", "g" }, 2 );
    CHECK( format_valuation( sig, {} ) == "{}" );
    const auto x = parse_valuation( "{ r@0 , g@1 }", sig );
    CHECK( x == v( sig, { { "r", 0 }, { "g", 1 } } ) );
    CHECK( format_valuation( sig, x ) == "{r@0,g@1}" );
    CHECK( parse_valuation( "{g}", sig ) == v( sig, { { "g", 0 } } ) );

    const auto w = parse_lasso( "{r@0};{} | {r@0,r@1}", sig );
    CHECK( w.prefix.size() == 2 );
    CHECK( w.loop.size() == 1 );
    CHECK( parse_lasso( format_lasso( sig, w ), sig ) == w );
    CHECK( parse_word( format_word( sig, w.prefix ), sig ) == w.prefix );
    CHECK( parse_word( "", sig ).empty() );

    CHECK_THROWS_AS( parse_valuation( "{q@0}", sig ), error );
    CHECK_THROWS_AS( parse_valuation( "{r@2}", sig ), error );
    CHECK_THROWS_AS( parse_lasso( "{r@0}|", sig ), error );
    try
    {
        parse_valuation( "{r@0,,}", sig );
        FAIL( "expected a parse error" );
    }
    catch ( const parse_error& e )
    {
        CHECK( e.line() == 1 );
        CHECK( e.column() == 6 );
    }
}

TEST_CASE( "lasso positions" )
{
    signature sig( { "p" }, 1 );
    const auto w = parse_lasso( "{};{p}|{};{p};{}", sig );
    CHECK( w.length() == 5 );
    CHECK( w.successor( 1 ) == 2 );
    CHECK( w.successor( 4 ) == 2 );
    CHECK( w.at( 3 ) == v( sig, { { "p", 0 } } ) );
}
