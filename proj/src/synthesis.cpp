#include <symsynth/synthesis.hpp>

#include <algorithm>
#include <bit>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

namespace symsynth
{

namespace
{

// SAT encoding of a transducer with `bound` states that reads letters of
// `obs`, writes `ctrl` bits and whose traces are all rejected by the
// automaton in its universal co-Büchi reading.
//
// Moore mode: ctrl depends on the state only, as for a system machine.
// Mealy mode: ctrl depends on the state and the observed letter, as for an
// environment that sees the current output before picking the input.
class transducer_encoding
{
public:
    transducer_encoding( const buchi_automaton& a, prop_mask obs, prop_mask ctrl, int bound, bool mealy )
        : _a{ a }, _bound{ bound }, _mealy{ mealy }, _letters{ enumerate_letters( obs ) }
    {
        if ( bound < 1 )
            throw error( "bound must be at least 1" );
        for ( int b = 0; b < 64; ++b )
            if ( ( ctrl >> b ) & 1u )
                _ctrl_bits.push_back( b );
        const int letters = static_cast<int>( _letters.size() );
        const int ctrl_rows = _mealy ? letters : 1;
        const int states = a.num_states();

        if ( bound > 1 )
        {
            _next.resize( static_cast<std::size_t>( bound ) * letters * bound );
            for ( auto& v : _next )
                v = _cnf.new_var();
            for ( int t = 0; t < bound; ++t )
                for ( int l = 0; l < letters; ++l )
                {
                    std::vector<int> some;
                    for ( int u = 0; u < bound; ++u )
                        some.push_back( next_var( t, l, u ) );
                    _cnf.add( some );
                    for ( int u = 0; u < bound; ++u )
                        for ( int w = u + 1; w < bound; ++w )
                            _cnf.add( { -next_var( t, l, u ), -next_var( t, l, w ) } );
                }
        }
        _ctrl.resize( static_cast<std::size_t>( bound ) * ctrl_rows * _ctrl_bits.size() );
        for ( auto& v : _ctrl )
            v = _cnf.new_var();
        _reach.resize( static_cast<std::size_t>( bound ) * states );
        for ( auto& v : _reach )
            v = _cnf.new_var();

        // Rank counters live only on cyclic components with accepting states.
        std::vector<std::vector<int>> succ( states );
        for ( int q = 0; q < states; ++q )
            for ( const auto& e : a.edges( q ) )
                succ[ q ].push_back( e.to );
        _comp = scc_ids( succ );
        std::map<int, int> comp_size;
        for ( int c : _comp )
            ++comp_size[ c ];
        std::map<int, bool> ranked;
        for ( int q = 0; q < states; ++q )
            for ( int t : succ[ q ] )
                if ( _comp[ t ] == _comp[ q ] && ( a.accepting( q ) || a.accepting( t ) ) )
                    ranked[ _comp[ q ] ] = true;
        _rank.resize( static_cast<std::size_t>( bound ) * states );
        for ( int q = 0; q < states; ++q )
        {
            if ( !ranked[ _comp[ q ] ] )
                continue;
            const int width = std::bit_width( static_cast<unsigned>( bound * comp_size[ _comp[ q ] ] ) );
            for ( int t = 0; t < bound; ++t )
                for ( int i = 0; i < width; ++i )
                    _rank[ t * states + q ].push_back( _cnf.new_var() );
        }

        for ( int q : a.initial() )
            _cnf.add( { reach_var( 0, q ) } );
        for ( int q = 0; q < states; ++q )
            if ( a.accepting_sink( q ) )
                for ( int t = 0; t < bound; ++t )
                    _cnf.add( { -reach_var( t, q ) } );

        for ( int t = 0; t < bound; ++t )
            for ( int l = 0; l < letters; ++l )
                for ( int q = 0; q < states; ++q )
                    for ( const auto& e : a.edges( q ) )
                    {
                        const valuation seen = _letters[ l ];
                        if ( ( e.guard.pos & obs & ~seen.bits ) || ( e.guard.neg & obs & seen.bits ) )
                            continue;
                        // Propositions outside the alphabet are constantly false.
                        if ( e.guard.pos & ~( obs | ctrl ) )
                            continue;
                        std::vector<int> base{ -reach_var( t, q ) };
                        for ( std::size_t k = 0; k < _ctrl_bits.size(); ++k )
                        {
                            const prop_mask bit = prop_mask{ 1 } << _ctrl_bits[ k ];
                            if ( e.guard.pos & bit )
                                base.push_back( -ctrl_var( t, l, static_cast<int>( k ) ) );
                            else if ( e.guard.neg & bit )
                                base.push_back( ctrl_var( t, l, static_cast<int>( k ) ) );
                        }
                        const bool ranked_edge = !_rank[ q ].empty() && _comp[ q ] == _comp[ e.to ];
                        for ( int u = 0; u < bound; ++u )
                        {
                            auto clause = base;
                            if ( bound > 1 )
                                clause.push_back( -next_var( t, l, u ) );
                            auto reach_clause = clause;
                            reach_clause.push_back( reach_var( u, e.to ) );
                            _cnf.add( std::move( reach_clause ) );
                            if ( ranked_edge )
                            {
                                clause.push_back( compare( u, e.to, t, q, a.accepting( e.to ) ) );
                                _cnf.add( std::move( clause ) );
                            }
                        }
                    }
    }

    const cnf& formula() const { return _cnf; }

    int successor( const sat_model& m, int t, int l ) const
    {
        if ( _bound == 1 )
            return 0;
        for ( int u = 0; u < _bound; ++u )
            if ( m[ next_var( t, l, u ) ] )
                return u;
        throw error( "decoded model has no successor" );
    }

    valuation control( const sat_model& m, int t, int l ) const
    {
        valuation out;
        for ( std::size_t k = 0; k < _ctrl_bits.size(); ++k )
            if ( m[ ctrl_var( t, l, static_cast<int>( k ) ) ] )
                out.bits |= prop_mask{ 1 } << _ctrl_bits[ k ];
        return out;
    }

    const std::vector<valuation>& letters() const { return _letters; }

private:
    int next_var( int t, int l, int u ) const
    {
        return _next[ ( static_cast<std::size_t>( t ) * _letters.size() + l ) * _bound + u ];
    }

    int ctrl_var( int t, int l, int k ) const
    {
        const std::size_t row = _mealy ? static_cast<std::size_t>( t ) * _letters.size() + l : t;
        return _ctrl[ row * _ctrl_bits.size() + k ];
    }

    int reach_var( int t, int q ) const { return _reach[ static_cast<std::size_t>( t ) * _a.num_states() + q ]; }

    // Variable implying rank(u, q2) >= rank(t, q1), or > when strict.
    int compare( int u, int q2, int t, int q1, bool strict )
    {
        const auto key = std::tuple( u, q2, t, q1, strict );
        if ( auto it = _compare_cache.find( key ); it != _compare_cache.end() )
            return it->second;
        const auto& a = _rank[ u * _a.num_states() + q2 ];
        const auto& b = _rank[ t * _a.num_states() + q1 ];
        // c[i]: the comparison holds on bits i..0 given equality above i.
        int lower = 0;
        for ( std::size_t i = 0; i < a.size(); ++i )
        {
            const int c = _cnf.new_var();
            _cnf.add( { -c, a[ i ], -b[ i ] } );
            std::vector<int> both{ -c, -a[ i ], -b[ i ] };
            std::vector<int> neither{ -c, a[ i ], b[ i ] };
            if ( i == 0 )
            {
                if ( strict )
                {
                    _cnf.add( both );
                    _cnf.add( neither );
                }
            }
            else
            {
                both.push_back( lower );
                neither.push_back( lower );
                _cnf.add( both );
                _cnf.add( neither );
            }
            lower = c;
        }
        _compare_cache.emplace( key, lower );
        return lower;
    }

    const buchi_automaton& _a;
    int _bound;
    bool _mealy;
    std::vector<valuation> _letters;
    std::vector<int> _ctrl_bits;
    cnf _cnf;
    std::vector<int> _next;
    std::vector<int> _ctrl;
    std::vector<int> _reach;
    std::vector<int> _comp;
    std::vector<std::vector<int>> _rank;
    std::map<std::tuple<int, int, int, int, bool>, int> _compare_cache;
};

void check_alphabet( const signature& sig, prop_mask inputs, prop_mask outputs )
{
    if ( inputs & outputs )
        throw error( "inputs and outputs overlap" );
    if ( ( inputs | outputs ) & ~sig.full_mask() )
        throw error( "propositions outside the universe" );
    if ( std::popcount( inputs ) > 16 || std::popcount( outputs ) > 16 )
        throw error( "alphabet too large for explicit enumeration" );
}

} // namespace

std::optional<moore_machine> bounded_synthesis( const buchi_automaton& bad, prop_mask inputs, prop_mask outputs, int bound,
                                                sat_solver& solver, std::stop_token stop )
{
    check_alphabet( bad.sig(), inputs, outputs );
    const transducer_encoding enc( bad, inputs, outputs, bound, false );
    const auto model = solver.solve( enc.formula(), stop );
    if ( !model )
        return std::nullopt;
    std::vector<valuation> labels;
    std::vector<int> delta;
    for ( int t = 0; t < bound; ++t )
    {
        labels.push_back( enc.control( *model, t, 0 ) );
        for ( std::size_t l = 0; l < enc.letters().size(); ++l )
            delta.push_back( enc.successor( *model, t, static_cast<int>( l ) ) );
    }
    return reachable_part( moore_machine( bad.sig(), inputs, outputs, false, 0, std::move( labels ), std::move( delta ) ) );
}

std::optional<moore_machine> bounded_synthesis( const formula& phi, const signature& sig, prop_mask inputs, prop_mask outputs,
                                                int bound, sat_solver& solver, std::stop_token stop )
{
    return bounded_synthesis( ltl_to_nba( formula::not_( phi ), sig ), inputs, outputs, bound, solver, stop );
}

int env_strategy::observation_index( valuation output ) const
{
    for ( std::size_t i = 0; i < observations.size(); ++i )
        if ( observations[ i ] == output )
            return static_cast<int>( i );
    throw error( "output letter outside the observed alphabet" );
}

valuation env_strategy::choice( int state, valuation output ) const
{
    return choices[ state * observations.size() + observation_index( output ) ];
}

int env_strategy::next( int state, valuation output ) const
{
    return successors[ state * observations.size() + observation_index( output ) ];
}

std::optional<env_strategy> counter_strategy( const formula& phi, const signature& sig, prop_mask inputs, prop_mask outputs,
                                              int bound, sat_solver& solver, std::stop_token stop )
{
    check_alphabet( sig, inputs, outputs );
    const auto nba = ltl_to_nba( phi, sig );
    const transducer_encoding enc( nba, outputs, inputs, bound, true );
    const auto model = solver.solve( enc.formula(), stop );
    if ( !model )
        return std::nullopt;
    env_strategy env;
    env.sig = sig;
    env.inputs = inputs;
    env.outputs = outputs;
    env.observations = enc.letters();
    // Keep only states reachable from state 0.
    std::vector<int> id( bound, -1 );
    std::vector<int> order{ 0 };
    id[ 0 ] = 0;
    for ( std::size_t i = 0; i < order.size(); ++i )
        for ( std::size_t l = 0; l < env.observations.size(); ++l )
        {
            const int u = enc.successor( *model, order[ i ], static_cast<int>( l ) );
            if ( id[ u ] < 0 )
            {
                id[ u ] = static_cast<int>( order.size() );
                order.push_back( u );
            }
        }
    for ( int t : order )
        for ( std::size_t l = 0; l < env.observations.size(); ++l )
        {
            env.choices.push_back( enc.control( *model, t, static_cast<int>( l ) ) );
            env.successors.push_back( id[ enc.successor( *model, t, static_cast<int>( l ) ) ] );
        }
    return env;
}

bool strategy_wins( const env_strategy& env, const formula& phi )
{
    const auto nba = ltl_to_nba( phi, env.sig );
    const int obs = static_cast<int>( env.observations.size() );
    std::map<std::pair<int, int>, int> ids;
    std::vector<std::pair<int, int>> keys;
    auto intern = [ & ]( int e, int q ) {
        auto [ it, inserted ] = ids.try_emplace( { e, q }, static_cast<int>( keys.size() ) );
        if ( inserted )
            keys.emplace_back( e, q );
        return it->second;
    };
    search_graph g;
    for ( int q : nba.initial() )
        g.initial.push_back( intern( 0, q ) );
    for ( std::size_t i = 0; i < keys.size(); ++i )
    {
        const auto [ e, q ] = keys[ i ];
        std::vector<std::pair<int, int>> out;
        for ( int o = 0; o < obs; ++o )
        {
            const valuation letter = env.observations[ o ] | env.choices[ e * obs + o ];
            for ( const auto& edge : nba.edges( q ) )
                if ( edge.guard.matches( letter ) )
                    out.emplace_back( intern( env.successors[ e * obs + o ], edge.to ), o );
        }
        g.succ.push_back( std::move( out ) );
        g.accepting.push_back( nba.accepting( q ) );
    }
    return !nested_dfs( g ).has_value();
}

lasso_word play( const env_strategy& env, const moore_machine& system )
{
    if ( system.sig() != env.sig || system.inputs() != env.inputs || system.outputs() != env.outputs )
        throw error( "strategy and machine use different alphabets" );
    std::map<std::pair<int, int>, std::size_t> seen;
    word trace;
    int s = system.initial();
    int e = 0;
    while ( !seen.count( { s, e } ) )
    {
        seen[ { s, e } ] = trace.size();
        const valuation out = system.label( s );
        const valuation in = env.choice( e, out );
        trace.push_back( out | in );
        s = system.step( s, in );
        e = env.next( e, out );
    }
    const std::size_t start = seen[ { s, e } ];
    return { word( trace.begin(), trace.begin() + start ), word( trace.begin() + start, trace.end() ) };
}

std::string format_strategy( const env_strategy& env )
{
    std::ostringstream out;
    const int obs = static_cast<int>( env.observations.size() );
    out << "environment strategy with " << env.num_states() << " state" << ( env.num_states() == 1 ? "" : "s" ) << "\n";
    for ( int e = 0; e < env.num_states(); ++e )
        for ( int o = 0; o < obs; ++o )
            out << "  e" << e << " on " << format_valuation( env.sig, env.observations[ o ] ) << ": input "
                << format_valuation( env.sig, env.choices[ e * obs + o ] ) << " -> e" << env.successors[ e * obs + o ] << "\n";
    return out.str();
}

synthesis_verdict synth_symmetric( const architecture& arch, const formula& phi, const synthesis_options& options )
{
    const auto& sig = arch.sig();
    const int n = arch.processes();
    if ( std::popcount( arch.input_mask() ) > max_input_bits )
        throw error( "input alphabet has " + std::to_string( std::popcount( arch.input_mask() ) ) + " bits; at most " +
                     std::to_string( max_input_bits ) + " are supported" );
    if ( options.max_bound < 0 || options.unreal_bound < 0 )
        throw error( "bounds must be non-negative" );
    check_atoms( phi, sig );

    std::mutex lock;
    auto say = [ & ]( const std::string& msg ) {
        if ( options.progress )
        {
            std::scoped_lock guard( lock );
            options.progress( msg );
        }
    };
    cdcl_solver fallback;
    sat_solver& solver = options.solver ? *options.solver : fallback;

    const formula strengthened = strengthen_spec( phi, n );
    const formula full = formula::and_( strengthened, outcond_formula( arch ) );
    const auto bad = ltl_to_nba( formula::not_( full ), sig );
    say( "automaton for the negated specification has " + std::to_string( bad.num_states() ) + " states" );

    auto release = [ & ]( const moore_machine& g, int k ) {
        moore_machine completed = g;
        try
        {
            completed = symmetric_completion( g, n );
        }
        catch ( const completion_error& e )
        {
            throw verification_error( std::string( "symmetric completion: " ) + e.what() );
        }
        if ( auto v = symmetry_check( completed, n ) )
            throw verification_error( "completed machine is not symmetric (rotation " + std::to_string( v->rotation ) +
                                      ", input " + format_word( sig, v->witness ) + ")" );
        const std::pair<const char*, const formula*> gates[] = {
            { "the specification", &phi }, { "the strengthened specification", &strengthened }, { "the specification with the output condition", &full } };
        for ( const auto& [ what, f ] : gates )
            if ( auto cex = model_check( completed, *f ) )
                throw verification_error( std::string( "completed machine violates " ) + what + " on " +
                                          format_lasso( sig, cex->trace ) );
        moore_machine process = extract_process( completed );
        if ( !bisim_equiv( symmetric_product( process, n ), completed ) )
            throw verification_error( "symmetric product of the extracted process differs from the global machine" );
        return realizable{ std::move( process ), std::move( completed ), k };
    };

    // Each search runs its bounds in increasing order, so whichever verdict
    // arrives is the one a sequential run would produce: both players
    // cannot win.
    std::stop_source cancel;
    std::optional<synthesis_verdict> verdict;
    std::exception_ptr failure;
    auto settle = [ & ]( synthesis_verdict v ) {
        std::scoped_lock guard( lock );
        if ( !verdict && !failure )
            verdict = std::move( v );
    };
    auto guarded = [ & ]( auto search ) {
        try
        {
            search();
        }
        catch ( const solver_interrupted& )
        {
        }
        catch ( ... )
        {
            {
                std::scoped_lock guard( lock );
                if ( !verdict && !failure )
                    failure = std::current_exception();
            }
            cancel.request_stop();
        }
    };

    std::jthread environment( [ & ] {
        guarded( [ & ] {
            for ( int k = 1; k <= options.unreal_bound && !cancel.stop_requested(); ++k )
            {
                say( "environment bound " + std::to_string( k ) );
                if ( auto env = counter_strategy( full, sig, arch.input_mask(), arch.output_mask(), k, solver, cancel.get_token() ) )
                {
                    cancel.request_stop();
                    if ( !strategy_wins( *env, full ) )
                        throw verification_error( "counter-strategy does not defeat every system" );
                    settle( unrealizable{ std::move( *env ), k } );
                    return;
                }
            }
        } );
    } );
    guarded( [ & ] {
        for ( int k = 1; k <= options.max_bound && !cancel.stop_requested(); ++k )
        {
            say( "system bound " + std::to_string( k ) );
            if ( auto g = bounded_synthesis( bad, arch.input_mask(), arch.output_mask(), k, solver, cancel.get_token() ) )
            {
                cancel.request_stop();
                say( "found a " + std::to_string( g->num_states() ) + "-state global machine" );
                settle( release( *g, k ) );
                return;
            }
        }
    } );
    environment.join();

    if ( failure )
        std::rethrow_exception( failure );
    if ( verdict )
        return std::move( *verdict );
    return unknown{ options.max_bound, options.unreal_bound };
}

} // namespace symsynth
