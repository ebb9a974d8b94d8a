#include <symsynth/sat.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <csignal>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace symsynth
{

void cnf::add( std::vector<int> clause )
{
    for ( int lit : clause )
    {
        if ( lit == 0 )
            throw error( "literal 0 is reserved" );
        _vars = std::max( _vars, std::abs( lit ) );
    }
    _clauses.push_back( std::move( clause ) );
}

std::string cnf::to_dimacs() const
{
    std::ostringstream out;
    out << "p cnf " << _vars << " " << _clauses.size() << "\n";
    for ( const auto& c : _clauses )
    {
        for ( int lit : c )
            out << lit << " ";
        out << "0\n";
    }
    return out.str();
}

bool satisfies( const cnf& f, const sat_model& model )
{
    if ( model.size() < static_cast<std::size_t>( f.num_vars() ) + 1 )
        return false;
    for ( const auto& c : f.clauses() )
    {
        const bool ok = std::any_of( c.begin(), c.end(), [ & ]( int lit ) { return model[ std::abs( lit ) ] == ( lit > 0 ); } );
        if ( !ok )
            return false;
    }
    return true;
}

namespace
{

// Internal literal encoding: 2 * var + sign, var 0-based.
class cdcl
{
public:
    explicit cdcl( int vars )
        : _vars{ vars }, _value( vars, -1 ), _level( vars, 0 ), _reason( vars, -1 ), _activity( vars, 0.0 ),
          _polarity( vars, 1 ), _seen( vars, 0 ), _watches( 2 * static_cast<std::size_t>( vars ) ), _heap_pos( vars, -1 )
    {
        for ( int v = 0; v < vars; ++v )
            heap_insert( v );
    }

    bool add_clause( std::vector<int> lits )
    {
        std::sort( lits.begin(), lits.end() );
        lits.erase( std::unique( lits.begin(), lits.end() ), lits.end() );
        for ( std::size_t i = 1; i < lits.size(); ++i )
            if ( lits[ i ] == ( lits[ i - 1 ] ^ 1 ) )
                return true;
        std::erase_if( lits, [ & ]( int l ) { return value( l ) == 0; } );
        if ( std::any_of( lits.begin(), lits.end(), [ & ]( int l ) { return value( l ) == 1; } ) )
            return true;
        if ( lits.empty() )
            return false;
        if ( lits.size() == 1 )
        {
            enqueue( lits[ 0 ], -1 );
            return propagate() < 0;
        }
        attach( std::move( lits ) );
        return true;
    }

    bool solve( const std::stop_token& stop )
    {
        int restart = 0;
        for ( ;; )
        {
            const long budget = 64L * luby( restart++ );
            const int status = search( budget, stop );
            if ( status != 0 )
                return status > 0;
        }
    }

    bool model_value( int v ) const { return _value[ v ] == 1; }

private:
    int value( int lit ) const
    {
        const int v = _value[ lit >> 1 ];
        return v < 0 ? -1 : v ^ ( lit & 1 );
    }

    int decision_level() const { return static_cast<int>( _trail_lim.size() ); }

    int attach( std::vector<int> lits )
    {
        const int id = static_cast<int>( _clauses.size() );
        _watches[ lits[ 0 ] ].push_back( id );
        _watches[ lits[ 1 ] ].push_back( id );
        _clauses.push_back( std::move( lits ) );
        return id;
    }

    void enqueue( int lit, int reason )
    {
        const int v = lit >> 1;
        _value[ v ] = ( lit & 1 ) ? 0 : 1;
        _level[ v ] = decision_level();
        _reason[ v ] = reason;
        _trail.push_back( lit );
    }

    // Returns the conflicting clause or -1.
    int propagate()
    {
        while ( _qhead < _trail.size() )
        {
            const int false_lit = _trail[ _qhead++ ] ^ 1;
            auto& list = _watches[ false_lit ];
            std::size_t keep = 0;
            for ( std::size_t i = 0; i < list.size(); ++i )
            {
                const int id = list[ i ];
                auto& lits = _clauses[ id ];
                if ( lits[ 0 ] == false_lit )
                    std::swap( lits[ 0 ], lits[ 1 ] );
                if ( value( lits[ 0 ] ) == 1 )
                {
                    list[ keep++ ] = id;
                    continue;
                }
                bool moved = false;
                for ( std::size_t k = 2; k < lits.size(); ++k )
                    if ( value( lits[ k ] ) != 0 )
                    {
                        std::swap( lits[ 1 ], lits[ k ] );
                        _watches[ lits[ 1 ] ].push_back( id );
                        moved = true;
                        break;
                    }
                if ( moved )
                    continue;
                list[ keep++ ] = id;
                if ( value( lits[ 0 ] ) == 0 )
                {
                    for ( ++i; i < list.size(); ++i )
                        list[ keep++ ] = list[ i ];
                    list.resize( keep );
                    _qhead = _trail.size();
                    return id;
                }
                enqueue( lits[ 0 ], id );
            }
            list.resize( keep );
        }
        return -1;
    }

    std::pair<std::vector<int>, int> analyze( int conflict )
    {
        std::vector<int> learnt{ -1 };
        int pending = 0;
        int p = -1;
        std::size_t index = _trail.size();
        int clause = conflict;
        do
        {
            const auto& lits = _clauses[ clause ];
            for ( std::size_t j = ( p < 0 ? 0 : 1 ); j < lits.size(); ++j )
            {
                const int q = lits[ j ];
                const int v = q >> 1;
                if ( _seen[ v ] || _level[ v ] == 0 )
                    continue;
                bump( v );
                _seen[ v ] = 1;
                if ( _level[ v ] >= decision_level() )
                    ++pending;
                else
                    learnt.push_back( q );
            }
            while ( !_seen[ _trail[ --index ] >> 1 ] )
                ;
            p = _trail[ index ];
            clause = _reason[ p >> 1 ];
            _seen[ p >> 1 ] = 0;
            --pending;
        } while ( pending > 0 );
        learnt[ 0 ] = p ^ 1;

        // Drop literals implied by the rest of the clause (local minimization).
        std::vector<int> minimized{ learnt[ 0 ] };
        for ( std::size_t i = 1; i < learnt.size(); ++i )
        {
            const int v = learnt[ i ] >> 1;
            const int r = _reason[ v ];
            bool redundant = r >= 0;
            if ( redundant )
                for ( std::size_t k = 1; k < _clauses[ r ].size(); ++k )
                {
                    const int u = _clauses[ r ][ k ] >> 1;
                    if ( !_seen[ u ] && _level[ u ] > 0 )
                    {
                        redundant = false;
                        break;
                    }
                }
            if ( !redundant )
                minimized.push_back( learnt[ i ] );
        }
        for ( std::size_t i = 1; i < learnt.size(); ++i )
            _seen[ learnt[ i ] >> 1 ] = 0;

        int back = 0;
        if ( minimized.size() > 1 )
        {
            std::size_t best = 1;
            for ( std::size_t i = 2; i < minimized.size(); ++i )
                if ( _level[ minimized[ i ] >> 1 ] > _level[ minimized[ best ] >> 1 ] )
                    best = i;
            std::swap( minimized[ 1 ], minimized[ best ] );
            back = _level[ minimized[ 1 ] >> 1 ];
        }
        return { std::move( minimized ), back };
    }

    void backtrack( int level )
    {
        if ( decision_level() <= level )
            return;
        for ( std::size_t i = _trail.size(); i-- > static_cast<std::size_t>( _trail_lim[ level ] ); )
        {
            const int v = _trail[ i ] >> 1;
            _polarity[ v ] = _trail[ i ] & 1;
            _value[ v ] = -1;
            _reason[ v ] = -1;
            if ( _heap_pos[ v ] < 0 )
                heap_insert( v );
        }
        _trail.resize( _trail_lim[ level ] );
        _trail_lim.resize( level );
        _qhead = _trail.size();
    }

    // 1: sat, -1: unsat, 0: restart.
    int search( long budget, const std::stop_token& stop )
    {
        long conflicts = 0;
        for ( ;; )
        {
            if ( stop.stop_requested() )
                throw solver_interrupted();
            const int conflict = propagate();
            if ( conflict >= 0 )
            {
                if ( decision_level() == 0 )
                    return -1;
                ++conflicts;
                auto [ learnt, back ] = analyze( conflict );
                backtrack( back );
                if ( learnt.size() == 1 )
                    enqueue( learnt[ 0 ], -1 );
                else
                {
                    const int lit = learnt[ 0 ];
                    const int id = attach( std::move( learnt ) );
                    enqueue( lit, id );
                }
                _var_inc /= 0.95;
                continue;
            }
            if ( conflicts >= budget )
            {
                backtrack( 0 );
                return 0;
            }
            int next = -1;
            while ( !_heap.empty() )
            {
                const int v = heap_pop();
                if ( _value[ v ] < 0 )
                {
                    next = v;
                    break;
                }
            }
            if ( next < 0 )
                return 1;
            _trail_lim.push_back( static_cast<int>( _trail.size() ) );
            enqueue( 2 * next + _polarity[ next ], -1 );
        }
    }

    // Luby sequence 1 1 2 1 1 2 4 ... at 0-based position x.
    static long luby( int x )
    {
        long size = 1;
        int seq = 0;
        while ( size < x + 1 )
        {
            ++seq;
            size = 2 * size + 1;
        }
        while ( size - 1 != x )
        {
            size = ( size - 1 ) >> 1;
            --seq;
            x = static_cast<int>( x % size );
        }
        return 1L << seq;
    }

    void bump( int v )
    {
        _activity[ v ] += _var_inc;
        if ( _activity[ v ] > 1e100 )
        {
            for ( auto& a : _activity )
                a *= 1e-100;
            _var_inc *= 1e-100;
        }
        if ( _heap_pos[ v ] >= 0 )
            sift_up( _heap_pos[ v ] );
    }

    bool before( int a, int b ) const
    {
        return _activity[ a ] > _activity[ b ] || ( _activity[ a ] == _activity[ b ] && a < b );
    }

    void heap_insert( int v )
    {
        _heap_pos[ v ] = static_cast<int>( _heap.size() );
        _heap.push_back( v );
        sift_up( _heap_pos[ v ] );
    }

    int heap_pop()
    {
        const int top = _heap[ 0 ];
        _heap[ 0 ] = _heap.back();
        _heap_pos[ _heap[ 0 ] ] = 0;
        _heap.pop_back();
        _heap_pos[ top ] = -1;
        if ( !_heap.empty() )
            sift_down( 0 );
        return top;
    }

    void sift_up( int i )
    {
        const int v = _heap[ i ];
        while ( i > 0 )
        {
            const int parent = ( i - 1 ) / 2;
            if ( !before( v, _heap[ parent ] ) )
                break;
            _heap[ i ] = _heap[ parent ];
            _heap_pos[ _heap[ i ] ] = i;
            i = parent;
        }
        _heap[ i ] = v;
        _heap_pos[ v ] = i;
    }

    void sift_down( int i )
    {
        const int v = _heap[ i ];
        const int size = static_cast<int>( _heap.size() );
        for ( ;; )
        {
            int child = 2 * i + 1;
            if ( child >= size )
                break;
            if ( child + 1 < size && before( _heap[ child + 1 ], _heap[ child ] ) )
                ++child;
            if ( !before( _heap[ child ], v ) )
                break;
            _heap[ i ] = _heap[ child ];
            _heap_pos[ _heap[ i ] ] = i;
            i = child;
        }
        _heap[ i ] = v;
        _heap_pos[ v ] = i;
    }

    int _vars;
    std::vector<int> _value;
    std::vector<int> _level;
    std::vector<int> _reason;
    std::vector<double> _activity;
    std::vector<int> _polarity;
    std::vector<char> _seen;
    std::vector<std::vector<int>> _watches;
    std::vector<std::vector<int>> _clauses;
    std::vector<int> _trail;
    std::vector<int> _trail_lim;
    std::size_t _qhead = 0;
    double _var_inc = 1.0;
    std::vector<int> _heap;
    std::vector<int> _heap_pos;
};

} // namespace

std::optional<sat_model> cdcl_solver::solve( const cnf& f, std::stop_token stop )
{
    cdcl s( f.num_vars() );
    for ( const auto& c : f.clauses() )
    {
        std::vector<int> lits;
        for ( int lit : c )
            lits.push_back( 2 * ( std::abs( lit ) - 1 ) + ( lit < 0 ? 1 : 0 ) );
        if ( !s.add_clause( std::move( lits ) ) )
            return std::nullopt;
    }
    if ( !s.solve( stop ) )
        return std::nullopt;
    sat_model model( f.num_vars() + 1, false );
    for ( int v = 1; v <= f.num_vars(); ++v )
        model[ v ] = s.model_value( v - 1 );
    return model;
}

namespace
{

// Runs `program file` with stdout captured. The child gets its own process
// group so that an interrupted run takes any helpers it spawned down too.
std::string run_solver( const std::string& program, const std::string& file, const std::stop_token& stop )
{
    int fds[ 2 ];
    if ( pipe( fds ) != 0 )
        throw solver_error( "cannot create a pipe" );
    const pid_t pid = fork();
    if ( pid < 0 )
    {
        close( fds[ 0 ] );
        close( fds[ 1 ] );
        throw solver_error( "cannot fork" );
    }
    if ( pid == 0 )
    {
        setpgid( 0, 0 );
        dup2( fds[ 1 ], STDOUT_FILENO );
        close( fds[ 0 ] );
        close( fds[ 1 ] );
        execl( program.c_str(), program.c_str(), file.c_str(), static_cast<char*>( nullptr ) );
        _exit( 127 );
    }
    setpgid( pid, pid );
    close( fds[ 1 ] );
    std::string output;
    char buffer[ 4096 ];
    bool interrupted = false;
    for ( ;; )
    {
        if ( stop.stop_requested() )
        {
            kill( -pid, SIGKILL );
            interrupted = true;
            break;
        }
        pollfd p{ fds[ 0 ], POLLIN, 0 };
        if ( poll( &p, 1, 50 ) <= 0 )
            continue;
        const ssize_t got = read( fds[ 0 ], buffer, sizeof buffer );
        if ( got <= 0 )
            break;
        output.append( buffer, static_cast<std::size_t>( got ) );
    }
    close( fds[ 0 ] );
    int status = 0;
    waitpid( pid, &status, 0 );
    if ( interrupted )
        throw solver_interrupted();
    return output;
}

} // namespace

std::optional<sat_model> external_solver::solve( const cnf& f, std::stop_token stop )
{
    std::string path = ( std::filesystem::temp_directory_path() / "symsynth-XXXXXX.cnf" ).string();
    const int fd = mkstemps( path.data(), 4 );
    if ( fd < 0 )
        throw solver_error( "cannot create a temporary DIMACS file" );
    close( fd );
    std::string output;
    try
    {
        {
            std::ofstream out( path );
            out << f.to_dimacs();
            if ( !out )
                throw solver_error( "cannot write " + path );
        }
        output = run_solver( _path, path, stop );
    }
    catch ( ... )
    {
        std::filesystem::remove( path );
        throw;
    }
    std::filesystem::remove( path );

    std::optional<sat_model> model;
    try
    {
        model = parse_solver_output( output, f.num_vars() );
    }
    catch ( const error& e )
    {
        throw solver_error( "SAT solver '" + _path + "': " + e.what() );
    }
    if ( model && !satisfies( f, *model ) )
        throw solver_error( "SAT solver '" + _path + "' returned a model that violates the formula" );
    return model;
}

std::unique_ptr<sat_solver> make_solver( const std::string& path )
{
    std::string chosen = path;
    if ( chosen.empty() )
        if ( const char* env = std::getenv( "SYMSYNTH_SAT" ) )
            chosen = env;
    if ( chosen.empty() )
        return std::make_unique<cdcl_solver>();
    return std::make_unique<external_solver>( chosen );
}

dimacs_problem parse_dimacs( std::string_view text )
{
    dimacs_problem out;
    int declared_vars = -1;
    std::vector<int> clause;
    std::istringstream in{ std::string( text ) };
    std::string line;
    int line_no = 0;
    while ( std::getline( in, line ) )
    {
        ++line_no;
        if ( line.empty() || line[ 0 ] == 'c' || line[ 0 ] == '%' )
            continue;
        std::istringstream fields( line );
        if ( line[ 0 ] == 'p' )
        {
            std::string p, kind;
            if ( !( fields >> p >> kind >> declared_vars >> out.declared_clauses ) || kind != "cnf" || declared_vars < 0 )
                throw parse_error( "malformed problem line", line_no, 1 );
            continue;
        }
        if ( declared_vars < 0 )
            throw parse_error( "clause before the problem line", line_no, 1 );
        long lit;
        while ( fields >> lit )
        {
            if ( std::labs( lit ) > declared_vars )
                throw parse_error( "literal exceeds the declared variable count", line_no, 1 );
            if ( lit == 0 )
            {
                out.formula.add( std::move( clause ) );
                clause.clear();
            }
            else
                clause.push_back( static_cast<int>( lit ) );
        }
        if ( !fields.eof() )
            throw parse_error( "unexpected token in clause", line_no, 1 );
    }
    if ( declared_vars < 0 )
        throw parse_error( "missing problem line", line_no + 1, 1 );
    if ( !clause.empty() )
        out.formula.add( std::move( clause ) );
    while ( out.formula.num_vars() < declared_vars )
        out.formula.new_var();
    return out;
}

std::optional<sat_model> parse_solver_output( std::string_view text, int vars )
{
    std::istringstream in{ std::string( text ) };
    std::string line;
    int status = 0;
    sat_model model( vars + 1, false );
    while ( std::getline( in, line ) )
    {
        if ( line.rfind( "s ", 0 ) == 0 )
        {
            const std::string verdict = line.substr( 2 );
            if ( verdict.rfind( "SATISFIABLE", 0 ) == 0 )
                status = 1;
            else if ( verdict.rfind( "UNSATISFIABLE", 0 ) == 0 )
                status = -1;
            else
                throw error( "unknown status line '" + line + "'" );
        }
        else if ( line.rfind( "v ", 0 ) == 0 )
        {
            std::istringstream fields( line.substr( 2 ) );
            long lit;
            while ( fields >> lit )
            {
                if ( lit == 0 )
                    break;
                if ( std::labs( lit ) > vars )
                    throw error( "model mentions unknown variable " + std::to_string( lit ) );
                model[ std::labs( lit ) ] = lit > 0;
            }
        }
    }
    if ( status == 0 )
        throw error( "no status line in solver output" );
    if ( status < 0 )
        return std::nullopt;
    return model;
}

} // namespace symsynth
