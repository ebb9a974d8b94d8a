// symsynth: command-line front end for symmetric synthesis and machine algebra.
//
// Exit codes: 0 ok / realizable / pass / true, 1 unrealizable / violation /
// false, 2 unknown verdict, 3 usage or format error, 4 internal error.

#include <symsynth/buchi.hpp>
#include <symsynth/compression.hpp>
#include <symsynth/machine_io.hpp>
#include <symsynth/spec_file.hpp>
#include <symsynth/synthesis.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

using namespace symsynth;

namespace
{

enum exit_code
{
    exit_ok = 0,
    exit_negative = 1,
    exit_unknown = 2,
    exit_usage = 3,
    exit_internal = 4
};

[[noreturn]] void rethrow_located( const std::string& where, const parse_error& e )
{
    throw parse_error( where + ":" + std::to_string( e.line() ) + ":" + std::to_string( e.column() ) + ": " + e.what(),
                       e.line(), e.column() );
}

moore_machine load_machine( const std::string& path )
{
    const std::string text = read_text_file( path );
    try
    {
        return machine_from_json( text );
    }
    catch ( const parse_error& e )
    {
        rethrow_located( path, e );
    }
}

spec_file load_spec( const std::string& path )
{
    const std::string text = read_text_file( path );
    try
    {
        return parse_spec_file( text );
    }
    catch ( const parse_error& e )
    {
        rethrow_located( path, e );
    }
}

void write_artifact( const std::string& path, const std::string& text )
{
    if ( path.empty() || path == "-" )
    {
        std::cout << text;
        return;
    }
    std::ofstream out( path, std::ios::binary );
    out << text;
    if ( !out )
        throw error( "cannot write '" + path + "'" );
}

void require_processes( const moore_machine& m, int n )
{
    if ( m.sig().processes() != n )
        throw error( "machine is built for n=" + std::to_string( m.sig().processes() ) + ", not n=" + std::to_string( n ) );
}

std::vector<std::string> split_list( const std::string& text )
{
    std::vector<std::string> out;
    std::string item;
    for ( char c : text + "," )
    {
        if ( c == ',' )
        {
            const auto a = item.find_first_not_of( " \t" );
            const auto b = item.find_last_not_of( " \t" );
            if ( a == std::string::npos )
                throw error( "empty entry in list '" + text + "'" );
            out.push_back( item.substr( a, b - a + 1 ) );
            item.clear();
        }
        else
            item += c;
    }
    return out;
}

// Universe for `eval`: names in order of first use, n = largest index + 1.
signature infer_signature( const raw_lasso& w, const formula& phi )
{
    std::vector<std::string> names;
    int n = 1;
    auto note = [ & ]( const std::string& name, int index ) {
        if ( std::find( names.begin(), names.end(), name ) == names.end() )
            names.push_back( name );
        n = std::max( n, index + 1 );
    };
    for ( const auto* part : { &w.prefix, &w.loop } )
        for ( const auto& letter : *part )
            for ( const auto& [ name, index ] : letter )
                note( name, index );
    for ( const auto& a : atoms( phi ) )
        note( a.name, a.index );
    if ( names.empty() )
        names.push_back( "p" );
    return signature( names, n );
}

template <typename F>
auto with_argument( const std::string& option, F&& parse )
{
    try
    {
        return parse();
    }
    catch ( const parse_error& e )
    {
        std::string what = e.what();
        throw parse_error( option + ": " + what, e.line(), e.column() );
    }
}

struct options
{
    std::string machine;
    std::string spec;
    std::string out;
    std::string dot;
    std::string global_out;
    std::string sat_solver;
    std::string word;
    std::string formula_text;
    std::string signals;
    int n = 0;
    int max_bound = 8;
    int unreal_bound = 4;
    bool verbose = false;
};

int cmd_synth( const options& o )
{
    const auto spec = load_spec( o.spec );
    std::unique_ptr<sat_solver> solver = make_solver( o.sat_solver );
    synthesis_options so;
    so.max_bound = o.max_bound;
    so.unreal_bound = o.unreal_bound;
    so.solver = solver.get();
    if ( o.verbose )
        so.progress = []( const std::string& msg ) { std::cerr << "symsynth: " << msg << "\n"; };
    const auto verdict = synth_symmetric( spec.arch, spec.phi, so );
    if ( const auto* r = std::get_if<realizable>( &verdict ) )
    {
        std::cerr << "realizable: " << r->global.num_states() << "-state global machine found at bound " << r->bound
                  << ", process machine has " << r->process.num_states() << " states\n";
        write_artifact( o.out, machine_to_json( r->process ) );
        if ( !o.dot.empty() )
            write_artifact( o.dot, machine_to_dot( r->process ) );
        if ( !o.global_out.empty() )
            write_artifact( o.global_out, machine_to_json( r->global ) );
        return exit_ok;
    }
    if ( const auto* u = std::get_if<unrealizable>( &verdict ) )
    {
        std::cout << "unrealizable: counter-strategy found at environment bound " << u->bound << "\n"
                  << format_strategy( u->counter );
        return exit_negative;
    }
    const auto& k = std::get<unknown>( verdict );
    std::cerr << "unknown: no machine with at most " << k.max_bound << " states and no counter-strategy with at most "
              << k.unreal_bound << " states\n";
    return exit_unknown;
}

int cmd_verify( const options& o )
{
    const auto spec = load_spec( o.spec );
    moore_machine m = load_machine( o.machine );
    require_processes( m, spec.arch.processes() );
    if ( m.local_outputs() )
        m = symmetric_product( m, spec.arch.processes() );
    try
    {
        m = rebind( m, spec.arch.sig() );
    }
    catch ( const error& )
    {
        throw error( "machine propositions do not match the specification's architecture" );
    }
    if ( m.inputs() != spec.arch.input_mask() || m.outputs() != spec.arch.output_mask() )
        throw error( "machine inputs and outputs do not match the specification's architecture" );
    if ( const auto cex = model_check( m, spec.phi ) )
    {
        std::cout << "violation\n";
        std::cout << "trace: " << format_lasso( m.sig(), cex->trace ) << "\n";
        std::cout << "inputs: " << format_lasso( m.sig(), cex->inputs ) << "\n";
        return exit_negative;
    }
    std::cout << "ok\n";
    return exit_ok;
}

int emit_machine( const options& o, const moore_machine& m )
{
    write_artifact( o.out, machine_to_json( m ) );
    if ( !o.dot.empty() )
        write_artifact( o.dot, machine_to_dot( m ) );
    return exit_ok;
}

int cmd_product( const options& o )
{
    const auto m = load_machine( o.machine );
    require_processes( m, o.n );
    return emit_machine( o, symmetric_product( m, o.n ) );
}

int cmd_extract( const options& o )
{
    return emit_machine( o, extract_process( load_machine( o.machine ) ) );
}

int cmd_complete( const options& o )
{
    const auto m = load_machine( o.machine );
    require_processes( m, o.n );
    try
    {
        return emit_machine( o, symmetric_completion( m, o.n ) );
    }
    catch ( const completion_error& e )
    {
        std::cerr << "symsynth: completion impossible; witness " << format_word( m.sig(), e.witness() ) << "\n";
        return exit_negative;
    }
}

int cmd_check_sym( const options& o )
{
    const auto m = load_machine( o.machine );
    require_processes( m, o.n );
    if ( const auto v = symmetry_check( m, o.n ) )
    {
        std::cout << "violation: witness " << format_word( m.sig(), v->witness ) << " rotation " << v->rotation << "\n";
        return exit_negative;
    }
    std::cout << "pass\n";
    return exit_ok;
}

int cmd_check_reps( const options& o )
{
    const auto m = load_machine( o.machine );
    require_processes( m, o.n );
    if ( const auto w = reps_divisibility_check( m, o.n ) )
    {
        std::cout << "violation: witness " << format_word( m.sig(), *w ) << "\n";
        return exit_negative;
    }
    std::cout << "pass\n";
    return exit_ok;
}

int cmd_eval( const options& o )
{
    const formula phi = with_argument( "--formula", [ & ] { return parse_formula( o.formula_text ); } );
    const raw_lasso raw = with_argument( "--word", [ & ] { return parse_raw_lasso( o.word ); } );
    const signature sig = infer_signature( raw, phi );
    const lasso_word w = parse_lasso( o.word, sig );
    const bool value = eval_lasso( sig, w, phi );
    std::cout << ( value ? "true" : "false" ) << "\n";
    return value ? exit_ok : exit_negative;
}

int cmd_compress_word( const options& o )
{
    const compression_scheme s( split_list( o.signals ) );
    if ( o.word.find( '|' ) == std::string::npos )
    {
        const word w = with_argument( "--word", [ & ] { return parse_word( o.word, s.source_sig() ); } );
        std::cout << format_word( s.target_sig(), compress_word( w, s ) ) << "\n";
        return exit_ok;
    }
    const lasso_word w = with_argument( "--word", [ & ] { return parse_lasso( o.word, s.source_sig() ); } );
    std::cout << format_lasso( s.target_sig(), compress_word( w, s ) ) << "\n";
    return exit_ok;
}

int cmd_compress_formula( const options& o )
{
    const compression_scheme s( split_list( o.signals ) );
    const formula psi = with_argument( "--formula", [ & ] { return parse_formula( o.formula_text, s.source_sig() ); } );
    std::cout << to_string( compress_formula( reduce_to_until( psi ), s ) ) << "\n";
    return exit_ok;
}

} // namespace

int main( int argc, char** argv )
{
    CLI::App app{ "Synthesis of rotation-symmetric process implementations" };
    app.require_subcommand( 1 );
    options o;

    auto* synth = app.add_subcommand( "synth", "Synthesize a process implementation from a spec file" );
    synth->add_option( "SPEC", o.spec, "Spec file" )->required();
    synth->add_option( "--max-bound", o.max_bound, "Largest system machine size to try" )->check( CLI::NonNegativeNumber );
    synth->add_option( "--unreal-bound", o.unreal_bound, "Largest environment strategy size to try" )->check( CLI::NonNegativeNumber );
    synth->add_option( "--out", o.out, "Write the process machine JSON here" );
    synth->add_option( "--dot", o.dot, "Write the process machine as DOT here" );
    synth->add_option( "--global-out", o.global_out, "Write the global machine JSON here" );
    synth->add_option( "--sat-solver", o.sat_solver, "External DIMACS solver (default: $SYMSYNTH_SAT, else embedded)" );
    synth->add_flag( "-v,--verbose", o.verbose, "Report search progress" );

    auto* verify = app.add_subcommand( "verify", "Model check a machine against a spec file" );
    verify->add_option( "MACHINE", o.machine, "Machine JSON" )->required();
    verify->add_option( "--spec", o.spec, "Spec file" )->required();

    auto add_machine_command = [ & ]( const char* name, const char* help, bool needs_n, bool emits ) {
        auto* cmd = app.add_subcommand( name, help );
        cmd->add_option( "MACHINE", o.machine, "Machine JSON" )->required();
        if ( needs_n )
            cmd->add_option( "-n", o.n, "Number of processes" )->required()->check( CLI::PositiveNumber );
        if ( emits )
        {
            cmd->add_option( "--out", o.out, "Write the machine JSON here" );
            cmd->add_option( "--dot", o.dot, "Also write DOT here" );
        }
        return cmd;
    };
    auto* product = add_machine_command( "product", "Symmetric product of a process machine", true, true );
    auto* extract = add_machine_command( "extract", "Process machine of a symmetric global machine", false, true );
    auto* complete = add_machine_command( "complete", "Symmetric completion of a global machine", true, true );
    auto* check_sym = add_machine_command( "check-sym", "Check the symmetry property", true, false );
    auto* check_reps = add_machine_command( "check-reps", "Check output symmetry divisibility", true, false );

    auto* eval = app.add_subcommand( "eval", "Evaluate a formula on a lasso word" );
    eval->add_option( "--word", o.word, "Lasso word, e.g. \"{p};{} | {p}\"" )->required();
    eval->add_option( "--formula", o.formula_text, "LTL formula" )->required();

    auto* cword = app.add_subcommand( "compress-word", "Compress a word over several signals into one carrier" );
    cword->add_option( "--word", o.word, "Word or lasso word over the signals" )->required();
    cword->add_option( "--signals", o.signals, "Comma-separated signal list" )->required();

    auto* cformula = app.add_subcommand( "compress-formula", "Compress a formula over several signals" );
    cformula->add_option( "--formula", o.formula_text, "LTL formula over name@0 signals" )->required();
    cformula->add_option( "--signals", o.signals, "Comma-separated signal list" )->required();

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::ParseError& e )
    {
        const int code = app.exit( e );
        return code == 0 ? exit_ok : exit_usage;
    }

    const std::map<CLI::App*, int ( * )( const options& )> commands = {
        { synth, cmd_synth },         { verify, cmd_verify },       { product, cmd_product },
        { extract, cmd_extract },     { complete, cmd_complete },   { check_sym, cmd_check_sym },
        { check_reps, cmd_check_reps }, { eval, cmd_eval },         { cword, cmd_compress_word },
        { cformula, cmd_compress_formula },
    };
    try
    {
        for ( const auto& [ cmd, run ] : commands )
            if ( cmd->parsed() )
                return run( o );
    }
    catch ( const verification_error& e )
    {
        std::cerr << "symsynth: internal verification failed: " << e.what() << "\n";
        return exit_internal;
    }
    catch ( const solver_error& e )
    {
        std::cerr << "symsynth: " << e.what() << "\n";
        return exit_internal;
    }
    catch ( const error& e )
    {
        std::cerr << "symsynth: " << e.what() << "\n";
        return exit_usage;
    }
    catch ( const std::exception& e )
    {
        std::cerr << "symsynth: internal error: " << e.what() << "\n";
        return exit_internal;
    }
    return exit_usage;
}
