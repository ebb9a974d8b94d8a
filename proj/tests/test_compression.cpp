#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <symsynth/compression.hpp>

using namespace symsynth;
using namespace symsynth::testing;

namespace
{

compression_scheme scheme( int signals )
{
    std::vector<std::string> names;
    for ( int j = 1; j <= signals; ++j )
        names.push_back( "x" + std::to_string( j ) );
    return compression_scheme( names );
}

std::string x_power( int k, const std::string& body )
{
    std::string out;
    for ( int i = 0; i < k; ++i )
        out += "X ";
    return out + body;
}

} // namespace

TEST_CASE( "block layout" )
{
    const auto s = scheme( 4 );
    CHECK( s.block_length() == 10 );
    const auto block = compress_word( parse_word( "{x2,x4}", s.source_sig() ), s );
    CHECK( format_word( s.target_sig(), block ) == "{chi@0};{chi@0};{};{};{};{chi@0};{};{};{};{chi@0}" );

    const auto blank = compress_word( word( 3 ), s );
    REQUIRE( blank.size() == 30 );
    for ( std::size_t i = 0; i < blank.size(); ++i )
        CHECK( blank[ i ].contains( 0 ) == ( i % 10 < 2 ) );

    CHECK_THROWS_AS( compress_word( word{ valuation{ 1u << 5 } }, s ), error );
}

TEST_CASE( "round trip" )
{
    rng r( default_seed );
    for ( int i = 0; i < 500; ++i )
    {
        const auto s = scheme( uniform( r, 1, 4 ) );
        const auto w = random_lasso( r, s.source_sig().full_mask(), 4, 4 );
        const auto c = compress_word( w, s );
        CHECK( c.prefix.size() == w.prefix.size() * static_cast<std::size_t>( s.block_length() ) );
        CHECK( c.loop.size() == w.loop.size() * static_cast<std::size_t>( s.block_length() ) );
        CHECK( decompress_word( c, s ) == w );
    }
    const auto s = scheme( 2 );
    CHECK_THROWS_AS( decompress_word( { {}, word( 5 ) }, s ), error );
    CHECK_THROWS_AS( decompress_word( { {}, word( 6 ) }, s ), error );
}

TEST_CASE( "compressed formulas" )
{
    const auto s = scheme( 4 );
    CHECK( compress_formula( parse_formula( "x3@0" ), s ) == parse_formula( x_power( 7, "chi@0" ) ) );
    CHECK( compress_formula( parse_formula( "X x1@0" ), s ) == parse_formula( x_power( 13, "chi@0" ) ) );

    const std::string marker = "chi@0 & X chi@0 & X X !chi@0";
    const auto expected = parse_formula( "(" + marker + " -> " + x_power( 9, "chi@0" ) + ") U (" + marker + " & " +
                                         x_power( 7, "chi@0" ) + ")" );
    CHECK( compress_formula( parse_formula( "x4@0 U x3@0" ), s ) == expected );

    const auto a = parse_formula( "x1@0 U X x2@0" ), b = parse_formula( "!x4@0" );
    CHECK( compress_formula( formula::and_( a, b ), s ) == formula::and_( compress_formula( a, s ), compress_formula( b, s ) ) );
    CHECK( compress_formula( formula::or_( a, b ), s ) == formula::or_( compress_formula( a, s ), compress_formula( b, s ) ) );

    CHECK_THROWS_AS( compress_formula( parse_formula( "F x1@0" ), s ), error );
    CHECK_THROWS_AS( compress_formula( parse_formula( "x5@0" ), s ), error );
    CHECK( compress_formula( reduce_to_until( parse_formula( "G F x1@0" ) ), s ).size() > 0 );

    // The example word: its continuation loops on the second letter.
    const auto w = parse_lasso( "{x2,x4}|{x1,x2}", s.source_sig() );
    const auto psi = parse_formula( "x4@0 U x3@0" );
    CHECK_FALSE( eval_lasso( s.source_sig(), w, psi ) );
    CHECK_FALSE( eval_lasso( s.target_sig(), compress_word( w, s ), expected ) );
}

TEST_CASE( "adjunction" )
{
    rng r( default_seed );
    int satisfied = 0;
    for ( int i = 0; i < 600; ++i )
    {
        const auto s = scheme( uniform( r, 1, 4 ) );
        const auto psi = random_formula( r, s.source_sig(), s.source_sig().full_mask(), uniform( r, 1, 12 ) );
        const auto w = random_lasso( r, s.source_sig().full_mask(), 3, 3 );
        const auto f = compress_formula( reduce_to_until( psi ), s );
        const auto c = compress_word( w, s );
        const bool expected = eval_lasso( s.source_sig(), w, psi );
        satisfied += expected;
        INFO( to_string( psi ), " on ", format_lasso( s.source_sig(), w ) );
        CHECK( eval_lasso( s.target_sig(), c, f ) == expected );

        // Block starts correspond to source positions.
        const auto source = eval_positions( s.source_sig(), w, psi );
        const auto target = eval_positions( s.target_sig(), c, f );
        for ( std::size_t pos = 0; pos < w.length(); ++pos )
            CHECK( target[ pos * static_cast<std::size_t>( s.block_length() ) ] == source[ pos ] );
    }
    CHECK( satisfied > 100 );
    CHECK( satisfied < 500 );
}

TEST_CASE( "validity formulas" )
{
    const auto three = make_validity_formulas( scheme( 3 ) );
    const std::string marker = "chi@0 & X chi@0 & X X !chi@0";
    CHECK( three.invalid1 == parse_formula( marker + " & (!" + x_power( 8, "chi@0" ) + " | !" + x_power( 9, "chi@0" ) + " | " +
                                            x_power( 10, "chi@0" ) + " | " + x_power( 2, "chi@0" ) + " | " +
                                            x_power( 4, "chi@0" ) + " | " + x_power( 6, "chi@0" ) + ")" ) );
    CHECK( three.invalid2 == parse_formula( "!chi@0 | !X chi@0 | X X chi@0" ) );

    rng r( default_seed );
    int noisy_invalid = 0;
    for ( int i = 0; i < 300; ++i )
    {
        const auto s = scheme( uniform( r, 1, 4 ) );
        const auto v = make_validity_formulas( s );
        const auto bad = formula::or_( formula::finally( v.invalid1 ), v.invalid2 );
        const auto c = compress_word( random_lasso( r, s.source_sig().full_mask(), 3, 3 ), s );
        CHECK_FALSE( eval_lasso( s.target_sig(), c, bad ) );
        CHECK( eval_lasso( s.target_sig(), c, v.correct ) );

        // Random carrier noise is almost never a compressed word.
        const auto noise = random_lasso( r, 1, 6, 12 );
        const bool flagged = eval_lasso( s.target_sig(), noise, bad );
        noisy_invalid += flagged;
        bool well_formed = false;
        try
        {
            if ( noise.prefix.size() % static_cast<std::size_t>( s.block_length() ) == 0 &&
                 noise.loop.size() % static_cast<std::size_t>( s.block_length() ) == 0 )
            {
                decompress_word( noise, s );
                well_formed = true;
            }
        }
        catch ( const error& )
        {
        }
        if ( well_formed )
            CHECK_FALSE( flagged );
    }
    CHECK( noisy_invalid > 250 );

    const auto s = scheme( 2 );
    CHECK( eval_lasso( s.target_sig(), parse_lasso( "{}|{chi}", s.target_sig() ), make_validity_formulas( s ).invalid2 ) );

    // The well-formedness formula for another proposition reads its own slots.
    signature sig( { "chi", "p" }, 1 );
    const auto cp = correct_formula( s, "p" );
    auto as_p = compress_word( parse_lasso( "{x1}|{x2};{}", s.source_sig() ), s );
    for ( auto* part : { &as_p.prefix, &as_p.loop } )
        for ( auto& letter : *part )
            letter.bits <<= 1;
    CHECK( eval_lasso( sig, as_p, cp ) );
    as_p.loop[ 2 ].bits |= 2;
    CHECK_FALSE( eval_lasso( sig, as_p, cp ) );
}
