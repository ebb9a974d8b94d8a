#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <symsynth/machine_io.hpp>
#include <symsynth/spec_file.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace symsynth;
namespace fs = std::filesystem;

namespace
{

struct result
{
    int code;
    std::string out;
};

result run( const std::string& args )
{
    const std::string command = std::string( SYMSYNTH_BIN ) + " " + args + " 2>/dev/null";
    FILE* pipe = popen( command.c_str(), "r" );
    REQUIRE( pipe );
    std::string out;
    char buffer[ 4096 ];
    std::size_t got;
    while ( ( got = fread( buffer, 1, sizeof buffer, pipe ) ) > 0 )
        out.append( buffer, got );
    const int status = pclose( pipe );
    return { WIFEXITED( status ) ? WEXITSTATUS( status ) : -1, out };
}

struct scratch
{
    fs::path dir;
    scratch() : dir{ fs::temp_directory_path() / ( "symsynth-cli-" + std::to_string( ::getpid() ) ) }
    {
        fs::create_directories( dir );
    }
    ~scratch() { fs::remove_all( dir ); }

    std::string write( const std::string& name, const std::string& text ) const
    {
        std::ofstream( dir / name ) << text;
        return ( dir / name ).string();
    }
    std::string path( const std::string& name ) const { return ( dir / name ).string(); }
};

const std::string constant_y0 = R"({
  "n": 2,
  "inputs": ["x@0", "x@1"],
  "outputs": ["y@0", "y@1"],
  "initial": 0,
  "states": [{"id": 0, "label": ["y@0"]}],
  "transitions": [
    {"from": 0, "input": [], "to": 0},
    {"from": 0, "input": ["x@0"], "to": 0},
    {"from": 0, "input": ["x@1"], "to": 0},
    {"from": 0, "input": ["x@0", "x@1"], "to": 0}
  ]
}
)";

} // namespace

TEST_CASE( "eval" )
{
    auto r = run( "eval --word '{p}|{p}' --formula 'G p@0'" );
    CHECK( r.code == 0 );
    CHECK( r.out == "true\n" );
    r = run( "eval --word '{p}|{}' --formula 'G p@0'" );
    CHECK( r.code == 1 );
    CHECK( r.out == "false\n" );
    CHECK( run( "eval --word '{p}|' --formula 'G p@0'" ).code == 3 );
    CHECK( run( "eval --word '{p}|{p}' --formula 'G (p@0'" ).code == 3 );
    CHECK( run( "eval --word '{r@1}|{r@0}' --formula 'r@1 & X r@0'" ).code == 0 );
}

TEST_CASE( "usage errors" )
{
    CHECK( run( "" ).code == 3 );
    CHECK( run( "frobnicate" ).code == 3 );
    CHECK( run( "eval --word '{}|{}'" ).code == 3 );
    CHECK( run( "synth /nonexistent.sym" ).code == 3 );
    CHECK( run( "--help" ).code == 0 );
}

TEST_CASE( "symmetry checks" )
{
    scratch s;
    const auto asym = s.write( "asym.json", constant_y0 );
    auto r = run( "check-sym " + asym + " -n 2" );
    CHECK( r.code == 1 );
    CHECK( r.out == "violation: witness \xCE\xB5 rotation 1\n" );
    r = run( "check-reps " + asym + " -n 2" );
    CHECK( r.code == 1 );
    CHECK( run( "complete " + asym + " -n 2" ).code == 1 );
    CHECK( run( "check-sym " + asym + " -n 3" ).code == 3 );

    std::string sym_text = constant_y0;
    sym_text.replace( sym_text.find( R"(["y@0"])" ), 7, R"(["y@0", "y@1"])" );
    const auto sym = s.write( "sym.json", sym_text );
    r = run( "check-sym " + sym + " -n 2" );
    CHECK( r.code == 0 );
    CHECK( r.out == "pass\n" );
    CHECK( run( "check-reps " + sym + " -n 2" ).code == 0 );

    r = run( "extract " + sym + " --out " + s.path( "p.json" ) );
    CHECK( r.code == 0 );
    const auto p = machine_from_json( read_text_file( s.path( "p.json" ) ) );
    CHECK( p.local_outputs() );
    r = run( "product " + s.path( "p.json" ) + " -n 2" );
    CHECK( r.code == 0 );
    CHECK( bisim_equiv( machine_from_json( r.out ), machine_from_json( sym_text ) ) );
    r = run( "complete " + sym + " -n 2 --dot " + s.path( "c.dot" ) );
    CHECK( r.code == 0 );
    CHECK( read_text_file( s.path( "c.dot" ) ).rfind( "digraph", 0 ) == 0 );
}

TEST_CASE( "malformed machines" )
{
    scratch s;
    const auto broken = s.write( "broken.json", "{\n  \"n\": 2,\n  \"inputs\": [\n" );
    CHECK( run( "check-sym " + broken + " -n 2" ).code == 3 );
    const auto partial = s.write( "partial.json", R"({"n": 1, "inputs": ["x@0"], "outputs": ["y@0"], "initial": 0,
      "states": [{"id": 0, "label": []}], "transitions": [{"from": 0, "input": [], "to": 0}]})" );
    CHECK( run( "check-sym " + partial + " -n 1" ).code == 3 );
}

TEST_CASE( "synthesis and verification" )
{
    scratch s;
    auto r = run( "synth " + std::string( SPEC_DIR ) + "/arbiter2.sym --out " + s.path( "p.json" ) + " --global-out " +
                  s.path( "g.json" ) );
    CHECK( r.code == 0 );
    r = run( "verify " + s.path( "p.json" ) + " --spec " + std::string( SPEC_DIR ) + "/arbiter2.sym" );
    CHECK( r.code == 0 );
    CHECK( r.out == "ok\n" );
    CHECK( run( "verify " + s.path( "g.json" ) + " --spec " + std::string( SPEC_DIR ) + "/arbiter2.sym" ).code == 0 );
    CHECK( run( "check-sym " + s.path( "g.json" ) + " -n 2" ).code == 0 );

    r = run( "verify " + s.path( "p.json" ) + " --spec " + std::string( SPEC_DIR ) + "/mutex2.sym" );
    CHECK( r.code == 1 );
    CHECK( r.out.rfind( "violation\ntrace: ", 0 ) == 0 );

    r = run( "synth " + std::string( SPEC_DIR ) + "/mutex2.sym" );
    CHECK( r.code == 1 );
    CHECK( r.out.rfind( "unrealizable: counter-strategy found", 0 ) == 0 );

    const auto tight = s.write( "tight.sym", "n: 1\nlocal_inputs: x\noutputs: y\nspec: G (x@0 <-> X X y@0)\n" );
    CHECK( run( "synth " + tight + " --max-bound 1 --unreal-bound 1" ).code == 2 );

    CHECK( run( "synth " + std::string( SPEC_DIR ) + "/arbiter2.sym --sat-solver " + SYMSYNTH_DIMACS_BIN ).code == 0 );
    const auto liar = s.write( "liar.sh", "#!/bin/sh\necho 's SATISFIABLE'\necho 'v 0'\n" );
    fs::permissions( liar, fs::perms::owner_all );
    CHECK( run( "synth " + std::string( SPEC_DIR ) + "/arbiter2.sym --sat-solver " + liar ).code == 4 );
}

TEST_CASE( "spec file diagnostics" )
{
    scratch s;
    const auto bad = s.write( "bad.sym", "n: 2\nlocal_inputs: r\noutputs: g\nspec: G (r@0 -> F g@7)\n" );
    CHECK( run( "synth " + bad ).code == 3 );
    try
    {
        parse_spec_file( "n: 2\nlocal_inputs: r\noutputs: g\nspec: G (r@0 & )\n" );
        FAIL( "expected a parse error" );
    }
    catch ( const parse_error& e )
    {
        CHECK( e.line() == 4 );
        CHECK( e.column() == 16 );
    }
    CHECK_THROWS_AS( parse_spec_file( "n: 2\nlocal_inputs: r\nspec: G g@0\n" ), parse_error );
    CHECK_THROWS_AS( parse_spec_file( "n: 0\nlocal_inputs: r\noutputs: g\nspec: true\n" ), parse_error );
    CHECK_THROWS_AS( parse_spec_file( "n: 2\nlocal_inputs: r\noutputs: r\nspec: true\n" ), parse_error );
    const auto ok = parse_spec_file( "# comment\nn: 3\nlocal_inputs: a, b\noutputs: \nspec: G a@2 # trailing\n" );
    CHECK( ok.arch.processes() == 3 );
    CHECK( ok.arch.local_inputs().size() == 2 );
    CHECK( ok.arch.outputs().empty() );
}

TEST_CASE( "compression commands" )
{
    auto r = run( "compress-word --word '{x2,x4}' --signals x1,x2,x3,x4" );
    CHECK( r.code == 0 );
    CHECK( r.out == "{chi@0};{chi@0};{};{};{};{chi@0};{};{};{};{chi@0}\n" );
    r = run( "compress-word --word '|{x1}' --signals x1" );
    CHECK( r.code == 0 );
    CHECK( r.out.find( '|' ) != std::string::npos );
    r = run( "compress-formula --formula 'x4@0 U x3@0' --signals x1,x2,x3,x4" );
    CHECK( r.code == 0 );
    CHECK( parse_formula( r.out ) ==
           parse_formula( "(chi@0 & X chi@0 & X X !chi@0 -> X X X X X X X X X chi@0) U "
                          "(chi@0 & X chi@0 & X X !chi@0 & X X X X X X X chi@0)" ) );
    CHECK( run( "compress-formula --formula 'F x1@0' --signals x1" ).code == 0 );
    CHECK( run( "compress-formula --formula 'x9@0' --signals x1" ).code == 3 );
}
