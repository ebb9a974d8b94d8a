#include <symsynth/valuation.hpp>

#include <algorithm>
#include <bit>
#include <cctype>
#include <numeric>

namespace symsynth
{

signature::signature( std::vector<std::string> names, int processes )
    : _names{ std::move( names ) }, _processes{ processes }
{
    if ( _processes < 1 )
        throw error( "process count must be at least 1" );
    if ( width() > 64 )
        throw error( "proposition universe exceeds 64 indexed propositions" );
    for ( std::size_t i = 0; i < _names.size(); ++i )
        for ( std::size_t j = i + 1; j < _names.size(); ++j )
            if ( _names[ i ] == _names[ j ] )
                throw error( "duplicate proposition name '" + _names[ i ] + "'" );
}

std::optional<int> signature::position( std::string_view name ) const
{
    auto it = std::find( _names.begin(), _names.end(), name );
    if ( it == _names.end() )
        return std::nullopt;
    return static_cast<int>( it - _names.begin() );
}

int signature::bit( std::string_view name, int index ) const
{
    auto pos = position( name );
    if ( !pos )
        throw error( "unknown proposition '" + std::string( name ) + "'" );
    if ( index < 0 || index >= _processes )
        throw error( "index " + std::to_string( index ) + " of '" + std::string( name ) +
                     "' out of range for n=" + std::to_string( _processes ) );
    return bit( *pos, index );
}

std::string signature::prop_name( int bit ) const
{
    return _names[ position_of_bit( bit ) ] + "@" + std::to_string( index_of_bit( bit ) );
}

prop_mask signature::full_mask() const
{
    return width() == 64 ? ~prop_mask{ 0 } : ( prop_mask{ 1 } << width() ) - 1;
}

prop_mask signature::name_mask( int position ) const
{
    prop_mask m = 0;
    for ( int j = 0; j < _processes; ++j )
        m |= prop_mask{ 1 } << bit( position, j );
    return m;
}

prop_mask signature::index_mask( int index ) const
{
    prop_mask m = 0;
    for ( int p = 0; p < static_cast<int>( _names.size() ); ++p )
        m |= prop_mask{ 1 } << bit( p, index );
    return m;
}

prop_mask signature::names_mask( const std::vector<std::string>& names ) const
{
    prop_mask m = 0;
    for ( const auto& name : names )
    {
        auto pos = position( name );
        if ( !pos )
            throw error( "unknown proposition '" + name + "'" );
        m |= name_mask( *pos );
    }
    return m;
}

const valuation& lasso_word::at( std::size_t position ) const
{
    return position < prefix.size() ? prefix[ position ] : loop[ position - prefix.size() ];
}

std::size_t lasso_word::successor( std::size_t position ) const
{
    return position + 1 < length() ? position + 1 : prefix.size();
}

valuation rot( const signature& sig, valuation v, int k )
{
    const int n = sig.processes();
    const int shift = ( ( k % n ) + n ) % n * static_cast<int>( sig.names().size() );
    const int w = sig.width();
    if ( shift == 0 || w == 0 )
        return v;
    const prop_mask full = sig.full_mask();
    return { ( ( v.bits << shift ) | ( v.bits >> ( w - shift ) ) ) & full };
}

word rot( const signature& sig, const word& w, int k )
{
    word out;
    out.reserve( w.size() );
    for ( auto v : w )
        out.push_back( rot( sig, v, k ) );
    return out;
}

lasso_word rot( const signature& sig, const lasso_word& w, int k )
{
    return { rot( sig, w.prefix, k ), rot( sig, w.loop, k ) };
}

std::strong_ordering compare_valuations( valuation a, valuation b )
{
    const prop_mask diff = a.bits ^ b.bits;
    if ( diff == 0 )
        return std::strong_ordering::equal;
    const prop_mask first = diff & ( ~diff + 1 );
    return ( a.bits & first ) ? std::strong_ordering::greater : std::strong_ordering::less;
}

std::strong_ordering compare_words( const word& a, const word& b )
{
    const std::size_t common = std::min( a.size(), b.size() );
    for ( std::size_t i = 0; i < common; ++i )
        if ( auto c = compare_valuations( a[ i ], b[ i ] ); c != 0 )
            return c;
    return a.size() <=> b.size();
}

normalized_word normalize_word( const signature& sig, const word& t )
{
    normalized_word best{ t, 0 };
    for ( int i = 1; i < sig.processes(); ++i )
    {
        word candidate = rot( sig, t, i );
        if ( compare_words( candidate, best.normalized ) < 0 )
            best = { std::move( candidate ), i };
    }
    return best;
}

int rep( const signature& sig, valuation x )
{
    int count = 0;
    for ( int j = 0; j < sig.processes(); ++j )
        if ( rot( sig, x, j ) == x )
            ++count;
    return count;
}

int reps_extend( const signature& sig, int reps_so_far, valuation letter )
{
    return std::gcd( reps_so_far, rep( sig, letter ) );
}

int reps( const signature& sig, const word& w )
{
    int r = sig.processes();
    for ( auto letter : w )
        r = reps_extend( sig, r, letter );
    return r;
}

std::vector<valuation> enumerate_letters( prop_mask mask )
{
    std::vector<int> bits;
    for ( int b = 0; b < 64; ++b )
        if ( ( mask >> b ) & 1u )
            bits.push_back( b );
    if ( bits.size() > 20 )
        throw error( "alphabet too large to enumerate" );
    std::vector<valuation> letters( std::size_t{ 1 } << bits.size() );
    for ( std::size_t i = 0; i < letters.size(); ++i )
    {
        prop_mask m = 0;
        for ( std::size_t k = 0; k < bits.size(); ++k )
            if ( ( i >> k ) & 1u )
                m |= prop_mask{ 1 } << bits[ k ];
        letters[ i ] = { m };
    }
    return letters;
}

std::string format_valuation( const signature& sig, valuation v )
{
    std::string out = "{";
    bool first = true;
    for ( int b = 0; b < sig.width(); ++b )
    {
        if ( !v.contains( b ) )
            continue;
        if ( !first )
            out += ",";
        out += sig.prop_name( b );
        first = false;
    }
    return out + "}";
}

std::string format_word( const signature& sig, const word& w )
{
    if ( w.empty() )
        return "ε";
    std::string out;
    for ( std::size_t i = 0; i < w.size(); ++i )
    {
        if ( i )
            out += ";";
        out += format_valuation( sig, w[ i ] );
    }
    return out;
}

std::string format_lasso( const signature& sig, const lasso_word& w )
{
    std::string out;
    for ( std::size_t i = 0; i < w.prefix.size(); ++i )
    {
        if ( i )
            out += ";";
        out += format_valuation( sig, w.prefix[ i ] );
    }
    out += w.prefix.empty() ? "| " : " | ";
    for ( std::size_t i = 0; i < w.loop.size(); ++i )
    {
        if ( i )
            out += ";";
        out += format_valuation( sig, w.loop[ i ] );
    }
    return out;
}

namespace
{

class word_scanner
{
public:
    word_scanner( std::string_view text, std::size_t offset )
        : _text{ text }, _offset{ offset }
    {}

    void skip_space()
    {
        while ( _pos < _text.size() && std::isspace( static_cast<unsigned char>( _text[ _pos ] ) ) )
            ++_pos;
    }

    bool at_end()
    {
        skip_space();
        return _pos >= _text.size();
    }

    bool accept( char c )
    {
        skip_space();
        if ( _pos < _text.size() && _text[ _pos ] == c )
        {
            ++_pos;
            return true;
        }
        return false;
    }

    void expect( char c )
    {
        if ( !accept( c ) )
            fail( std::string( "expected '" ) + c + "'" );
    }

    [[noreturn]] void fail( const std::string& what ) const
    {
        throw parse_error( what + " at column " + std::to_string( column() ), 1, column() );
    }

    int column() const { return static_cast<int>( _offset + _pos ) + 1; }

    raw_valuation valuation_literal()
    {
        expect( '{' );
        raw_valuation out;
        if ( accept( '}' ) )
            return out;
        do
        {
            skip_space();
            std::size_t start = _pos;
            if ( _pos >= _text.size() || !( std::isalpha( static_cast<unsigned char>( _text[ _pos ] ) ) || _text[ _pos ] == '_' ) )
                fail( "expected proposition name" );
            while ( _pos < _text.size() && ( std::isalnum( static_cast<unsigned char>( _text[ _pos ] ) ) || _text[ _pos ] == '_' ) )
                ++_pos;
            std::string name( _text.substr( start, _pos - start ) );
            int index = 0;
            if ( _pos < _text.size() && _text[ _pos ] == '@' )
            {
                ++_pos;
                std::size_t digits = _pos;
                while ( _pos < _text.size() && std::isdigit( static_cast<unsigned char>( _text[ _pos ] ) ) )
                    ++_pos;
                if ( digits == _pos || _pos - digits > 6 )
                    fail( "expected index after '@'" );
                index = std::stoi( std::string( _text.substr( digits, _pos - digits ) ) );
            }
            out.emplace_back( std::move( name ), index );
        } while ( accept( ',' ) );
        expect( '}' );
        return out;
    }

    std::vector<raw_valuation> letters()
    {
        std::vector<raw_valuation> out;
        if ( at_end() )
            return out;
        skip_space();
        if ( _text.substr( _pos ).starts_with( "ε" ) )
        {
            _pos += std::string_view( "ε" ).size();
            return out;
        }
        out.push_back( valuation_literal() );
        while ( accept( ';' ) )
            out.push_back( valuation_literal() );
        return out;
    }

private:
    std::string_view _text;
    std::size_t _offset;
    std::size_t _pos = 0;
};

} // namespace

std::vector<raw_valuation> parse_raw_word( std::string_view text )
{
    word_scanner scanner( text, 0 );
    auto out = scanner.letters();
    if ( !scanner.at_end() )
        scanner.fail( "unexpected trailing input" );
    return out;
}

raw_lasso parse_raw_lasso( std::string_view text )
{
    const auto bar = text.find( '|' );
    if ( bar == std::string_view::npos )
        throw parse_error( "lasso word needs '|' between prefix and loop", 1, static_cast<int>( text.size() ) + 1 );
    raw_lasso out;
    {
        word_scanner scanner( text.substr( 0, bar ), 0 );
        out.prefix = scanner.letters();
        if ( !scanner.at_end() )
            scanner.fail( "unexpected input in prefix" );
    }
    {
        word_scanner scanner( text.substr( bar + 1 ), bar + 1 );
        out.loop = scanner.letters();
        if ( !scanner.at_end() )
            scanner.fail( "unexpected input in loop" );
        if ( out.loop.empty() )
            scanner.fail( "loop must contain at least one letter" );
    }
    return out;
}

valuation resolve( const signature& sig, const raw_valuation& raw )
{
    valuation v;
    for ( const auto& [ name, index ] : raw )
        v.bits |= prop_mask{ 1 } << sig.bit( name, index );
    return v;
}

valuation parse_valuation( std::string_view text, const signature& sig )
{
    auto letters = parse_raw_word( text );
    if ( letters.size() != 1 )
        throw parse_error( "expected exactly one valuation", 1, 1 );
    return resolve( sig, letters.front() );
}

word parse_word( std::string_view text, const signature& sig )
{
    word out;
    for ( const auto& raw : parse_raw_word( text ) )
        out.push_back( resolve( sig, raw ) );
    return out;
}

lasso_word parse_lasso( std::string_view text, const signature& sig )
{
    auto raw = parse_raw_lasso( text );
    lasso_word out;
    for ( const auto& r : raw.prefix )
        out.prefix.push_back( resolve( sig, r ) );
    for ( const auto& r : raw.loop )
        out.loop.push_back( resolve( sig, r ) );
    return out;
}

} // namespace symsynth
