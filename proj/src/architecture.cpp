#include <symsynth/architecture.hpp>

#include <bit>

namespace symsynth
{

architecture::architecture( int n, std::vector<std::string> local_inputs, std::vector<std::string> outputs )
    : _n{ n }, _local_inputs{ std::move( local_inputs ) }, _outputs{ std::move( outputs ) }
{
    std::vector<std::string> names = _local_inputs;
    names.insert( names.end(), _outputs.begin(), _outputs.end() );
    _sig = signature( std::move( names ), n );
    _input_mask = _sig.names_mask( _local_inputs );
    _output_mask = _sig.names_mask( _outputs );
}

void validate( const symmetric_wiring& w )
{
    if ( w.process_count < 1 )
        throw error( "architecture needs at least one process" );
    if ( w.global_inputs & w.signals )
        throw error( "global inputs and signals overlap" );
    std::map<int, int> writers;
    for ( int p = 0; p < w.process_count; ++p )
    {
        for ( int b = 0; b < w.process_sig.width(); ++b )
        {
            const bool is_input = ( w.process_inputs >> b ) & 1u;
            const bool is_output = ( w.process_outputs >> b ) & 1u;
            if ( is_input )
            {
                auto it = w.input_edges.find( { p, b } );
                if ( it == w.input_edges.end() )
                    throw error( "process " + std::to_string( p ) + " input '" + w.process_sig.prop_name( b ) + "' is not wired" );
                const prop_mask target = prop_mask{ 1 } << it->second;
                if ( !( target & ( w.global_inputs | w.signals ) ) )
                    throw error( "input edge of process " + std::to_string( p ) + " refers to an undeclared signal" );
            }
            if ( is_output )
            {
                auto it = w.output_edges.find( { p, b } );
                if ( it == w.output_edges.end() )
                    throw error( "process " + std::to_string( p ) + " output '" + w.process_sig.prop_name( b ) + "' is not wired" );
                if ( !( ( prop_mask{ 1 } << it->second ) & w.signals ) )
                    throw error( "output edge of process " + std::to_string( p ) + " refers to an undeclared signal" );
                ++writers[ it->second ];
            }
        }
    }
    for ( int b = 0; b < w.global_sig.width(); ++b )
    {
        if ( !( ( w.signals >> b ) & 1u ) )
            continue;
        const int count = writers.count( b ) ? writers.at( b ) : 0;
        if ( count != 1 )
            throw error( "signal '" + w.global_sig.prop_name( b ) + "' has " + std::to_string( count ) + " writers" );
    }
}

symmetric_wiring rotation_wiring( const architecture& arch )
{
    const auto& sig = arch.sig();
    const int n = arch.processes();
    symmetric_wiring w;
    w.process_sig = sig;
    w.process_inputs = arch.input_mask();
    w.process_outputs = arch.local_output_mask();
    w.global_sig = sig;
    w.global_inputs = arch.input_mask();
    w.signals = arch.output_mask();
    w.process_count = n;
    for ( int i = 0; i < n; ++i )
    {
        for ( int b = 0; b < sig.width(); ++b )
        {
            const int pos = sig.position_of_bit( b );
            const int j = sig.index_of_bit( b );
            if ( ( arch.input_mask() >> b ) & 1u )
                w.input_edges[ { i, b } ] = sig.bit( pos, ( ( j - i ) % n + n ) % n );
            if ( ( arch.local_output_mask() >> b ) & 1u )
                w.output_edges[ { i, b } ] = sig.bit( pos, i );
        }
    }
    return w;
}

} // namespace symsynth
