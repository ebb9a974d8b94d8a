#include <symsynth/spec_file.hpp>

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace symsynth
{

namespace
{

struct field
{
    std::string value;
    int line;
    int column;
};

bool is_identifier( const std::string& s )
{
    if ( s.empty() || !( std::isalpha( static_cast<unsigned char>( s[ 0 ] ) ) || s[ 0 ] == '_' ) )
        return false;
    for ( char c : s )
        if ( !( std::isalnum( static_cast<unsigned char>( c ) ) || c == '_' ) )
            return false;
    return s != "X" && s != "F" && s != "G" && s != "U" && s != "true" && s != "false";
}

std::vector<std::string> name_list( const field& f )
{
    std::vector<std::string> out;
    std::size_t start = 0;
    const std::string& text = f.value;
    if ( text.find_first_not_of( " \t" ) == std::string::npos )
        return out;
    while ( start <= text.size() )
    {
        std::size_t end = text.find( ',', start );
        if ( end == std::string::npos )
            end = text.size();
        std::string item = text.substr( start, end - start );
        const std::size_t lead = item.find_first_not_of( " \t" );
        const std::size_t trail = item.find_last_not_of( " \t" );
        const std::string name = lead == std::string::npos ? "" : item.substr( lead, trail - lead + 1 );
        if ( !is_identifier( name ) )
            throw parse_error( "expected a proposition name, got '" + name + "'", f.line,
                               f.column + static_cast<int>( start + ( lead == std::string::npos ? 0 : lead ) ) );
        out.push_back( name );
        start = end + 1;
    }
    return out;
}

} // namespace

spec_file parse_spec_file( std::string_view text )
{
    std::map<std::string, field> fields;
    std::istringstream in{ std::string( text ) };
    std::string line;
    int line_no = 0;
    while ( std::getline( in, line ) )
    {
        ++line_no;
        if ( auto hash = line.find( '#' ); hash != std::string::npos )
            line.erase( hash );
        if ( !line.empty() && line.back() == '\r' )
            line.pop_back();
        const std::size_t first = line.find_first_not_of( " \t" );
        if ( first == std::string::npos )
            continue;
        const std::size_t colon = line.find( ':', first );
        if ( colon == std::string::npos )
            throw parse_error( "expected 'key: value'", line_no, static_cast<int>( first ) + 1 );
        std::string key = line.substr( first, colon - first );
        while ( !key.empty() && ( key.back() == ' ' || key.back() == '\t' ) )
            key.pop_back();
        if ( key != "n" && key != "local_inputs" && key != "outputs" && key != "spec" )
            throw parse_error( "unknown field '" + key + "'", line_no, static_cast<int>( first ) + 1 );
        if ( fields.count( key ) )
            throw parse_error( "duplicate field '" + key + "'", line_no, static_cast<int>( first ) + 1 );
        std::size_t value_start = line.find_first_not_of( " \t", colon + 1 );
        if ( value_start == std::string::npos )
            value_start = line.size();
        fields[ key ] = { line.substr( value_start ), line_no, static_cast<int>( value_start ) + 1 };
    }
    for ( const char* key : { "n", "local_inputs", "outputs", "spec" } )
        if ( !fields.count( key ) )
            throw parse_error( std::string( "missing field '" ) + key + "'", line_no + 1, 1 );

    const field& nf = fields[ "n" ];
    std::string n_text = nf.value;
    while ( !n_text.empty() && ( n_text.back() == ' ' || n_text.back() == '\t' ) )
        n_text.pop_back();
    if ( n_text.empty() || n_text.size() > 4 || n_text.find_first_not_of( "0123456789" ) != std::string::npos ||
         std::stoi( n_text ) < 1 )
        throw parse_error( "n must be a positive integer", nf.line, nf.column );
    const int n = std::stoi( n_text );

    const auto inputs = name_list( fields[ "local_inputs" ] );
    const auto outputs = name_list( fields[ "outputs" ] );
    std::optional<architecture> arch;
    try
    {
        arch.emplace( n, inputs, outputs );
    }
    catch ( const parse_error& )
    {
        throw;
    }
    catch ( const error& e )
    {
        throw parse_error( e.what(), fields[ "outputs" ].line, fields[ "outputs" ].column );
    }

    const field& sf = fields[ "spec" ];
    try
    {
        formula phi = parse_formula( sf.value, arch->sig() );
        return { *arch, phi };
    }
    catch ( const parse_error& e )
    {
        std::string what = e.what();
        if ( auto at = what.rfind( " at column " ); at != std::string::npos )
            what.erase( at );
        throw parse_error( what, sf.line, sf.column + e.column() - 1 );
    }
    catch ( const error& e )
    {
        throw parse_error( e.what(), sf.line, sf.column );
    }
}

std::string read_text_file( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw error( "cannot open '" + path + "'" );
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

spec_file load_spec_file( const std::string& path )
{
    return parse_spec_file( read_text_file( path ) );
}

} // namespace symsynth
