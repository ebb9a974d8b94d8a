#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <symsynth/buchi.hpp>
#include <symsynth/synthesis.hpp>

using namespace symsynth;
using namespace symsynth::testing;

namespace
{

struct single
{
    architecture arch{ 1, { "x" }, { "y" } };
    const signature& sig() const { return arch.sig(); }
    prop_mask in() const { return arch.input_mask(); }
    prop_mask out() const { return arch.output_mask(); }
};

} // namespace

TEST_CASE( "bounded synthesis examples" )
{
    single s;
    cdcl_solver solver;

    const auto gy = bounded_synthesis( parse_formula( "G y@0" ), s.sig(), s.in(), s.out(), 1, solver );
    REQUIRE( gy );
    CHECK( gy->num_states() == 1 );
    CHECK( gy->label( 0 ) == parse_valuation( "{y@0}", s.sig() ) );

    for ( int bound = 1; bound <= 4; ++bound )
        CHECK_FALSE( bounded_synthesis( parse_formula( "G (y@0 & !y@0)" ), s.sig(), s.in(), s.out(), bound, solver ) );

    const auto delayed = parse_formula( "G (x@0 -> X y@0)" );
    const auto m = bounded_synthesis( delayed, s.sig(), s.in(), s.out(), 2, solver );
    REQUIRE( m );
    CHECK_FALSE( model_check( *m, delayed ) );
    // The machine that remembers the last input.
    const moore_machine memory( s.sig(), s.in(), s.out(), false, 0, { valuation{}, parse_valuation( "{y@0}", s.sig() ) },
                                { 0, 1, 0, 1 } );
    CHECK_FALSE( model_check( memory, delayed ) );

    const auto copy = parse_formula( "G (x@0 <-> X y@0)" );
    CHECK_FALSE( bounded_synthesis( copy, s.sig(), s.in(), s.out(), 1, solver ) );
    const auto two = bounded_synthesis( copy, s.sig(), s.in(), s.out(), 2, solver );
    REQUIRE( two );
    CHECK_FALSE( model_check( *two, copy ) );
    // The first output is unconstrained; after that it must echo the input.
    for ( int length = 1; length <= 4; ++length )
        for ( const auto& w : all_words( s.in(), length ) )
            CHECK( run_machine( *two, w ).outputs.back() == run_machine( memory, w ).outputs.back() );

    const auto liveness = parse_formula( "G (x@0 -> F y@0) & G F !y@0" );
    const auto live = bounded_synthesis( liveness, s.sig(), s.in(), s.out(), 2, solver );
    REQUIRE( live );
    CHECK_FALSE( model_check( *live, liveness ) );
}

TEST_CASE( "bounded synthesis on random specifications" )
{
    rng r( default_seed );
    cdcl_solver solver;
    int found = 0;
    for ( int i = 0; i < 60; ++i )
    {
        architecture arch( 1, { "x" }, { "y", "z" } );
        const auto phi = random_formula( r, arch.sig(), arch.sig().full_mask(), uniform( r, 2, 8 ) );
        std::optional<moore_machine> previous;
        for ( int bound = 1; bound <= 3; ++bound )
        {
            const auto m = bounded_synthesis( phi, arch.sig(), arch.input_mask(), arch.output_mask(), bound, solver );
            if ( previous )
                CHECK( m.has_value() );
            if ( m )
            {
                CHECK( m->num_states() <= bound );
                CHECK_FALSE( model_check( *m, phi ) );
                previous = m;
            }
        }
        found += previous.has_value();

        // Both players cannot win.
        const auto env = counter_strategy( phi, arch.sig(), arch.input_mask(), arch.output_mask(), 2, solver );
        if ( env )
        {
            CHECK_FALSE( previous );
            CHECK( strategy_wins( *env, phi ) );
        }
    }
    CHECK( found > 10 );
}

TEST_CASE( "counter strategies" )
{
    single s;
    cdcl_solver solver;

    const auto never = counter_strategy( formula::ff(), s.sig(), s.in(), s.out(), 1, solver );
    REQUIRE( never );
    CHECK( never->num_states() == 1 );

    const auto match = parse_formula( "G (y@0 <-> x@0)" );
    const auto env = counter_strategy( match, s.sig(), s.in(), s.out(), 1, solver );
    REQUIRE( env );
    CHECK( strategy_wins( *env, match ) );
    // It answers every output with the opposite input.
    CHECK( env->choice( 0, valuation{} ) == parse_valuation( "{x@0}", s.sig() ) );
    CHECK( env->choice( 0, parse_valuation( "{y@0}", s.sig() ) ) == valuation{} );
    for ( int bound = 1; bound <= 6; ++bound )
        CHECK_FALSE( bounded_synthesis( match, s.sig(), s.in(), s.out(), bound, solver ) );

    // Every machine loses against it.
    rng r( default_seed );
    for ( int i = 0; i < 50; ++i )
    {
        const auto m = random_global( r, s.arch, uniform( r, 1, 4 ) );
        CHECK_FALSE( eval_lasso( s.sig(), play( *env, m ), match ) );
    }

    const auto gy = parse_formula( "G y@0" );
    for ( int bound = 1; bound <= 6; ++bound )
        CHECK_FALSE( counter_strategy( gy, s.sig(), s.in(), s.out(), bound, solver ) );

    CHECK_FALSE( format_strategy( *env ).empty() );
}

TEST_CASE( "strategy check rejects losing strategies" )
{
    single s;
    env_strategy lazy;
    lazy.sig = s.sig();
    lazy.inputs = s.in();
    lazy.outputs = s.out();
    lazy.observations = enumerate_letters( s.out() );
    lazy.choices = { valuation{}, valuation{} };
    lazy.successors = { 0, 0 };
    CHECK_FALSE( strategy_wins( lazy, parse_formula( "G (y@0 <-> x@0)" ) ) );
    CHECK( strategy_wins( lazy, parse_formula( "F x@0" ) ) );
}

TEST_CASE( "symmetric synthesis on one process" )
{
    architecture arch( 1, { "x" }, { "y" } );
    const auto result = synth_symmetric( arch, parse_formula( "G (x@0 <-> X y@0)" ) );
    REQUIRE( std::holds_alternative<realizable>( result ) );
    const auto& ok = std::get<realizable>( result );
    CHECK( ok.process.num_states() == 2 );
    CHECK_FALSE( model_check( symmetric_product( ok.process, 1 ), parse_formula( "G (x@0 <-> X y@0)" ) ) );

    const auto bad = synth_symmetric( arch, parse_formula( "G (y@0 <-> x@0)" ) );
    CHECK( std::holds_alternative<unrealizable>( bad ) );
}

TEST_CASE( "symmetric arbiter" )
{
    architecture arch( 2, { "r" }, { "g" } );
    const auto phi = parse_formula( "G (r@0 -> F g@0)", arch.sig() );
    std::vector<std::string> log;
    synthesis_options options;
    options.progress = [ & ]( const std::string& line ) { log.push_back( line ); };
    const auto result = synth_symmetric( arch, phi, options );
    REQUIRE( std::holds_alternative<realizable>( result ) );
    const auto& ok = std::get<realizable>( result );
    CHECK( ok.bound <= 8 );
    CHECK_FALSE( log.empty() );
    const auto product = symmetric_product( ok.process, 2 );
    CHECK_FALSE( symmetry_check( ok.global, 2 ) );
    CHECK( bisim_equiv( product, ok.global ) );
    CHECK_FALSE( model_check( product, phi ) );
    CHECK_FALSE( model_check( product, rot_formula( phi, 1, 2 ) ) );
    CHECK_FALSE( model_check( product, outcond_formula( arch ) ) );
}

TEST_CASE( "symmetric mutual exclusion needs symmetry breaking" )
{
    architecture arch( 2, { "r" }, { "g" } );
    const auto phi = parse_formula( "G !(g@0 & g@1) & G (r@0 -> F g@0)", arch.sig() );
    const auto result = synth_symmetric( arch, phi );
    REQUIRE( std::holds_alternative<unrealizable>( result ) );
    const auto& no = std::get<unrealizable>( result );
    CHECK( no.bound <= 4 );
    const auto strong = formula::and_( strengthen_spec( phi, 2 ), outcond_formula( arch ) );
    CHECK( strategy_wins( no.counter, strong ) );

    // Without the symmetry requirement one machine can alternate grants.
    cdcl_solver solver;
    CHECK( bounded_synthesis( strengthen_spec( phi, 2 ), arch.sig(), arch.input_mask(), arch.output_mask(), 2, solver ) );
}

TEST_CASE( "no spurious unrealizability for known symmetric solutions" )
{
    rng r( default_seed );
    architecture arch( 2, { "r" }, { "g" } );
    // Grant exactly when the own request was seen one step earlier.
    const auto& sig = arch.sig();
    const moore_machine echo( sig, arch.input_mask(), arch.local_output_mask(), true, 0,
                              { valuation{}, parse_valuation( "{g}", sig ) }, { 0, 1, 0, 1, 0, 1, 0, 1 } );
    const auto phi = parse_formula( "G (r@0 -> X g@0) & G (!r@0 -> X !g@0)", sig );
    CHECK_FALSE( model_check( symmetric_product( echo, 2 ), strengthen_spec( phi, 2 ) ) );
    const auto result = synth_symmetric( arch, phi );
    REQUIRE( std::holds_alternative<realizable>( result ) );
    // Outputs after the first step are forced to the echo.
    const auto& process = std::get<realizable>( result ).process;
    for ( int length = 1; length <= 3; ++length )
        for ( const auto& w : all_words( echo.inputs(), length ) )
            CHECK( run_machine( process, w ).outputs.back() == run_machine( echo, w ).outputs.back() );
}

TEST_CASE( "unknown verdicts and limits" )
{
    architecture arch( 1, { "x" }, { "y" } );
    synthesis_options tight;
    tight.max_bound = 1;
    tight.unreal_bound = 1;
    const auto result = synth_symmetric( arch, parse_formula( "G (x@0 <-> X X y@0)" ), tight );
    REQUIRE( std::holds_alternative<unknown>( result ) );
    CHECK( std::get<unknown>( result ).max_bound == 1 );

    architecture wide( 3, { "a", "b", "c" }, { "y" } );
    CHECK_THROWS_AS( synth_symmetric( wide, parse_formula( "G y@0" ) ), error );
}
