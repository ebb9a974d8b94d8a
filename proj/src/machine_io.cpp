#include <symsynth/machine_io.hpp>

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>

namespace symsynth
{

using json = nlohmann::ordered_json;

namespace
{

std::string output_prop( const moore_machine& m, int bit )
{
    const auto& sig = m.sig();
    if ( m.local_outputs() )
        return sig.names()[ sig.position_of_bit( bit ) ];
    return sig.prop_name( bit );
}

json props( const moore_machine& m, prop_mask bits, prop_mask outputs )
{
    json out = json::array();
    for ( int b = 0; b < m.sig().width(); ++b )
    {
        if ( !( ( bits >> b ) & 1u ) )
            continue;
        out.push_back( ( outputs >> b ) & 1u ? output_prop( m, b ) : m.sig().prop_name( b ) );
    }
    return out;
}

[[noreturn]] void fail( const std::string& what )
{
    throw parse_error( "machine JSON: " + what, 1, 1 );
}

raw_prop split_prop( const std::string& text )
{
    const auto at = text.find( '@' );
    if ( at == std::string::npos )
        return { text, -1 };
    const std::string index = text.substr( at + 1 );
    if ( index.empty() || index.find_first_not_of( "0123456789" ) != std::string::npos || index.size() > 6 )
        fail( "bad proposition '" + text + "'" );
    return { text.substr( 0, at ), std::stoi( index ) };
}

std::vector<std::string> string_array( const json& doc, const char* key )
{
    if ( !doc.contains( key ) || !doc[ key ].is_array() )
        fail( std::string( "missing array '" ) + key + "'" );
    std::vector<std::string> out;
    for ( const auto& item : doc[ key ] )
    {
        if ( !item.is_string() )
            fail( std::string( "'" ) + key + "' must hold strings" );
        out.push_back( item.get<std::string>() );
    }
    return out;
}

int int_field( const json& obj, const char* key )
{
    if ( !obj.contains( key ) || !obj[ key ].is_number_integer() )
        fail( std::string( "missing integer '" ) + key + "'" );
    return obj[ key ].get<int>();
}

} // namespace

std::string machine_to_json( const moore_machine& m )
{
    json doc;
    doc[ "n" ] = m.sig().processes();
    doc[ "inputs" ] = props( m, m.inputs(), 0 );
    doc[ "outputs" ] = props( m, m.outputs(), m.outputs() );
    doc[ "initial" ] = m.initial();
    json states = json::array();
    for ( int s = 0; s < m.num_states(); ++s )
        states.push_back( { { "id", s }, { "label", props( m, m.label( s ).bits, m.outputs() ) } } );
    doc[ "states" ] = std::move( states );
    json transitions = json::array();
    for ( int s = 0; s < m.num_states(); ++s )
        for ( int l = 0; l < m.num_letters(); ++l )
            transitions.push_back( { { "from", s }, { "input", props( m, m.letter( l ).bits, 0 ) }, { "to", m.next( s, l ) } } );
    doc[ "transitions" ] = std::move( transitions );
    return doc.dump( 2 ) + "\n";
}

moore_machine machine_from_json( std::string_view text )
{
    json doc;
    try
    {
        doc = json::parse( text );
    }
    catch ( const json::parse_error& e )
    {
        // nlohmann reports a byte offset; convert it to line and column.
        std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        int line = 1;
        int column = 1;
        for ( std::size_t i = 0; i < offset && i < text.size(); ++i )
        {
            if ( text[ i ] == '\n' )
            {
                ++line;
                column = 1;
            }
            else
                ++column;
        }
        throw parse_error( "machine JSON: syntax error", line, column );
    }
    if ( !doc.is_object() )
        fail( "top level must be an object" );

    const int n = int_field( doc, "n" );
    if ( n < 1 )
        fail( "n must be positive" );
    const auto input_strings = string_array( doc, "inputs" );
    const auto output_strings = string_array( doc, "outputs" );

    std::vector<std::string> names;
    auto add_name = [ & ]( const std::string& name ) {
        if ( std::find( names.begin(), names.end(), name ) == names.end() )
            names.push_back( name );
    };
    std::vector<raw_prop> inputs;
    std::vector<raw_prop> outputs;
    for ( const auto& s : input_strings )
    {
        inputs.push_back( split_prop( s ) );
        if ( inputs.back().second < 0 )
            fail( "inputs must be written name@index" );
        add_name( inputs.back().first );
    }
    std::size_t input_names = names.size();
    bool local = false;
    bool indexed = false;
    for ( const auto& s : output_strings )
    {
        outputs.push_back( split_prop( s ) );
        ( outputs.back().second < 0 ? local : indexed ) = true;
        add_name( outputs.back().first );
    }
    if ( local && indexed )
        fail( "outputs mix local and indexed propositions" );
    for ( std::size_t i = 0; i < input_names; ++i )
        for ( const auto& p : outputs )
            if ( p.first == names[ i ] )
                fail( "'" + p.first + "' is both an input and an output" );

    const signature sig( names, n );
    auto resolve_props = [ & ]( const json& arr, const char* what ) {
        if ( !arr.is_array() )
            fail( std::string( what ) + " must be an array" );
        raw_valuation raw;
        for ( const auto& item : arr )
        {
            if ( !item.is_string() )
                fail( std::string( what ) + " must hold strings" );
            auto p = split_prop( item.get<std::string>() );
            if ( p.second < 0 )
                p.second = 0;
            raw.push_back( p );
        }
        try
        {
            return resolve( sig, raw );
        }
        catch ( const error& e )
        {
            fail( e.what() );
        }
    };
    auto mask_of = [ & ]( std::vector<raw_prop> list ) {
        for ( auto& p : list )
            if ( p.second < 0 )
                p.second = 0;
        try
        {
            return resolve( sig, list ).bits;
        }
        catch ( const error& e )
        {
            fail( e.what() );
        }
    };
    const prop_mask input_mask = mask_of( inputs );
    const prop_mask output_mask = mask_of( outputs );

    const int initial = int_field( doc, "initial" );
    if ( !doc.contains( "states" ) || !doc[ "states" ].is_array() )
        fail( "missing array 'states'" );
    std::map<int, valuation> labels;
    for ( const auto& st : doc[ "states" ] )
    {
        if ( !st.is_object() || !st.contains( "label" ) )
            fail( "state entries need 'id' and 'label'" );
        const int id = int_field( st, "id" );
        if ( !labels.emplace( id, resolve_props( st[ "label" ], "label" ) ).second )
            fail( "duplicate state id " + std::to_string( id ) );
    }
    std::map<int, int> index;
    std::vector<valuation> label_list;
    for ( const auto& [ id, label ] : labels )
    {
        index[ id ] = static_cast<int>( label_list.size() );
        label_list.push_back( label );
    }
    if ( !index.count( initial ) )
        fail( "initial state " + std::to_string( initial ) + " is not declared" );

    if ( std::popcount( input_mask ) > 16 )
        fail( "input alphabet too large" );
    const auto letters = enumerate_letters( input_mask );
    std::vector<int> delta( label_list.size() * letters.size(), -1 );
    if ( !doc.contains( "transitions" ) || !doc[ "transitions" ].is_array() )
        fail( "missing array 'transitions'" );
    for ( const auto& tr : doc[ "transitions" ] )
    {
        if ( !tr.is_object() || !tr.contains( "input" ) )
            fail( "transition entries need 'from', 'input' and 'to'" );
        const int from = int_field( tr, "from" );
        const int to = int_field( tr, "to" );
        if ( !index.count( from ) || !index.count( to ) )
            fail( "transition refers to an undeclared state" );
        const valuation in = resolve_props( tr[ "input" ], "input" );
        if ( in.bits & ~input_mask )
            fail( "transition input uses non-input propositions" );
        const auto pos = std::find( letters.begin(), letters.end(), in ) - letters.begin();
        auto& slot = delta[ index[ from ] * letters.size() + pos ];
        if ( slot >= 0 )
            fail( "duplicate transition from state " + std::to_string( from ) + " on " + format_valuation( sig, in ) );
        slot = index[ to ];
    }
    for ( std::size_t i = 0; i < delta.size(); ++i )
        if ( delta[ i ] < 0 )
            fail( "transitions do not cover input " + format_valuation( sig, letters[ i % letters.size() ] ) + " in state " +
                  std::to_string( std::next( labels.begin(), i / letters.size() )->first ) );
    return moore_machine( sig, input_mask, output_mask, local, index[ initial ], std::move( label_list ), std::move( delta ) );
}

std::string machine_to_dot( const moore_machine& m )
{
    const auto& sig = m.sig();
    auto label_text = [ & ]( valuation v ) {
        std::string out = "{";
        bool first = true;
        for ( int b = 0; b < sig.width(); ++b )
        {
            if ( !v.contains( b ) )
                continue;
            if ( !first )
                out += ",";
            out += ( m.outputs() >> b ) & 1u ? output_prop( m, b ) : sig.prop_name( b );
            first = false;
        }
        return out + "}";
    };
    std::ostringstream out;
    out << "digraph machine {\n";
    out << "  rankdir=LR;\n";
    out << "  init [shape=point];\n";
    for ( int s = 0; s < m.num_states(); ++s )
        out << "  s" << s << " [shape=box, label=\"s" << s << "\\n" << label_text( m.label( s ) ) << "\"];\n";
    out << "  init -> s" << m.initial() << ";\n";
    for ( int s = 0; s < m.num_states(); ++s )
    {
        std::map<int, std::string> grouped;
        for ( int l = 0; l < m.num_letters(); ++l )
        {
            auto& text = grouped[ m.next( s, l ) ];
            if ( !text.empty() )
                text += ", ";
            text += label_text( m.letter( l ) );
        }
        for ( const auto& [ to, text ] : grouped )
            out << "  s" << s << " -> s" << to << " [label=\"" << text << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace symsynth
