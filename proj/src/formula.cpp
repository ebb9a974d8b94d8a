#include <symsynth/formula.hpp>

#include <symsynth/architecture.hpp>

#include <cctype>
#include <functional>
#include <map>

namespace symsynth
{

struct formula::node
{
    op kind;
    std::string name;
    int index = 0;
    std::optional<formula> a;
    std::optional<formula> b;
};

formula formula::tt()
{
    static const formula value{ std::make_shared<const node>( node{ op::tt, {}, 0, std::nullopt, std::nullopt } ) };
    return value;
}

formula formula::ff()
{
    static const formula value{ std::make_shared<const node>( node{ op::ff, {}, 0, std::nullopt, std::nullopt } ) };
    return value;
}

formula formula::atom( std::string name, int index )
{
    auto n = node{ op::atom, {}, 0, std::nullopt, std::nullopt };
    n.name = std::move( name );
    n.index = index;
    return formula{ std::make_shared<const node>( std::move( n ) ) };
}

#define SYMSYNTH_UNARY( fn, kind_ )                                    \
    formula formula::fn( formula a )                                   \
    {                                                                  \
        auto n = node{ kind_, {}, 0, std::nullopt, std::nullopt };                                   \
        n.a = std::move( a );                                          \
        return formula{ std::make_shared<const node>( std::move( n ) ) }; \
    }

#define SYMSYNTH_BINARY( fn, kind_ )                                   \
    formula formula::fn( formula a, formula b )                        \
    {                                                                  \
        auto n = node{ kind_, {}, 0, std::nullopt, std::nullopt };                                   \
        n.a = std::move( a );                                          \
        n.b = std::move( b );                                          \
        return formula{ std::make_shared<const node>( std::move( n ) ) }; \
    }

SYMSYNTH_UNARY( not_, op::not_ )
SYMSYNTH_UNARY( next, op::next )
SYMSYNTH_UNARY( finally, op::finally )
SYMSYNTH_UNARY( globally, op::globally )
SYMSYNTH_BINARY( and_, op::and_ )
SYMSYNTH_BINARY( or_, op::or_ )
SYMSYNTH_BINARY( implies, op::implies )
SYMSYNTH_BINARY( iff, op::iff )
SYMSYNTH_BINARY( until, op::until )

#undef SYMSYNTH_UNARY
#undef SYMSYNTH_BINARY

op formula::kind() const { return _node->kind; }
const std::string& formula::name() const { return _node->name; }
int formula::index() const { return _node->index; }
const formula& formula::lhs() const { return *_node->a; }
const formula& formula::rhs() const { return *_node->b; }

std::size_t formula::size() const
{
    std::size_t s = 1;
    if ( _node->a )
        s += _node->a->size();
    if ( _node->b )
        s += _node->b->size();
    return s;
}

bool operator==( const formula& x, const formula& y )
{
    if ( x._node == y._node )
        return true;
    const auto& a = *x._node;
    const auto& b = *y._node;
    if ( a.kind != b.kind || a.name != b.name || a.index != b.index )
        return false;
    if ( a.a.has_value() != b.a.has_value() || a.b.has_value() != b.b.has_value() )
        return false;
    return ( !a.a || *a.a == *b.a ) && ( !a.b || *a.b == *b.b );
}

formula conjunction( const std::vector<formula>& parts )
{
    if ( parts.empty() )
        return formula::tt();
    formula out = parts.front();
    for ( std::size_t i = 1; i < parts.size(); ++i )
        out = formula::and_( out, parts[ i ] );
    return out;
}

formula disjunction( const std::vector<formula>& parts )
{
    if ( parts.empty() )
        return formula::ff();
    formula out = parts.front();
    for ( std::size_t i = 1; i < parts.size(); ++i )
        out = formula::or_( out, parts[ i ] );
    return out;
}

formula next_n( formula a, int times )
{
    for ( int i = 0; i < times; ++i )
        a = formula::next( a );
    return a;
}

// ---------------------------------------------------------------------------
// Parsing

namespace
{

enum class tok
{
    ident,
    number,
    at,
    lparen,
    rparen,
    bang,
    amp,
    bar,
    arrow,
    dbl_arrow,
    end
};

struct token
{
    tok kind;
    std::string text;
    int column;
};

std::vector<token> tokenize( std::string_view text )
{
    std::vector<token> out;
    std::size_t i = 0;
    auto col = [ & ]( std::size_t p ) { return static_cast<int>( p ) + 1; };
    while ( i < text.size() )
    {
        const unsigned char c = text[ i ];
        if ( std::isspace( c ) )
        {
            ++i;
            continue;
        }
        if ( std::isalpha( c ) || c == '_' )
        {
            std::size_t start = i;
            while ( i < text.size() && ( std::isalnum( static_cast<unsigned char>( text[ i ] ) ) || text[ i ] == '_' ) )
                ++i;
            out.push_back( { tok::ident, std::string( text.substr( start, i - start ) ), col( start ) } );
            continue;
        }
        if ( std::isdigit( c ) )
        {
            std::size_t start = i;
            while ( i < text.size() && std::isdigit( static_cast<unsigned char>( text[ i ] ) ) )
                ++i;
            out.push_back( { tok::number, std::string( text.substr( start, i - start ) ), col( start ) } );
            continue;
        }
        const std::string_view rest = text.substr( i );
        if ( rest.starts_with( "<->" ) )
        {
            out.push_back( { tok::dbl_arrow, "<->", col( i ) } );
            i += 3;
            continue;
        }
        if ( rest.starts_with( "->" ) )
        {
            out.push_back( { tok::arrow, "->", col( i ) } );
            i += 2;
            continue;
        }
        tok kind;
        switch ( c )
        {
        case '@': kind = tok::at; break;
        case '(': kind = tok::lparen; break;
        case ')': kind = tok::rparen; break;
        case '!': kind = tok::bang; break;
        case '&': kind = tok::amp; break;
        case '|': kind = tok::bar; break;
        default:
            throw parse_error( std::string( "unexpected character '" ) + static_cast<char>( c ) + "' at column " + std::to_string( col( i ) ), 1, col( i ) );
        }
        out.push_back( { kind, std::string( 1, static_cast<char>( c ) ), col( i ) } );
        ++i;
    }
    out.push_back( { tok::end, "", col( text.size() ) } );
    return out;
}

class parser
{
public:
    explicit parser( std::string_view text ) : _tokens{ tokenize( text ) } {}

    formula parse()
    {
        formula f = parse_iff();
        if ( peek().kind != tok::end )
            fail( "unexpected '" + peek().text + "'" );
        return f;
    }

private:
    const token& peek() const { return _tokens[ _pos ]; }
    bool is_keyword( const char* kw ) const { return peek().kind == tok::ident && peek().text == kw; }

    [[noreturn]] void fail( const std::string& what ) const
    {
        throw parse_error( what + " at column " + std::to_string( peek().column ), 1, peek().column );
    }

    formula parse_iff()
    {
        formula left = parse_implies();
        while ( peek().kind == tok::dbl_arrow )
        {
            ++_pos;
            left = formula::iff( left, parse_implies() );
        }
        return left;
    }

    formula parse_implies()
    {
        formula left = parse_or();
        if ( peek().kind == tok::arrow )
        {
            ++_pos;
            return formula::implies( left, parse_implies() );
        }
        return left;
    }

    formula parse_or()
    {
        formula left = parse_and();
        while ( peek().kind == tok::bar )
        {
            ++_pos;
            left = formula::or_( left, parse_and() );
        }
        return left;
    }

    formula parse_and()
    {
        formula left = parse_until();
        while ( peek().kind == tok::amp )
        {
            ++_pos;
            left = formula::and_( left, parse_until() );
        }
        return left;
    }

    formula parse_until()
    {
        formula left = parse_unary();
        while ( is_keyword( "U" ) )
        {
            ++_pos;
            left = formula::until( left, parse_unary() );
        }
        return left;
    }

    formula parse_unary()
    {
        if ( peek().kind == tok::bang )
        {
            ++_pos;
            return formula::not_( parse_unary() );
        }
        if ( is_keyword( "X" ) )
        {
            ++_pos;
            return formula::next( parse_unary() );
        }
        if ( is_keyword( "F" ) )
        {
            ++_pos;
            return formula::finally( parse_unary() );
        }
        if ( is_keyword( "G" ) )
        {
            ++_pos;
            return formula::globally( parse_unary() );
        }
        return parse_primary();
    }

    formula parse_primary()
    {
        const token& t = peek();
        if ( t.kind == tok::lparen )
        {
            ++_pos;
            formula inner = parse_iff();
            if ( peek().kind != tok::rparen )
                fail( "expected ')'" );
            ++_pos;
            return inner;
        }
        if ( t.kind != tok::ident )
            fail( t.kind == tok::end ? "unexpected end of formula" : "unexpected '" + t.text + "'" );
        if ( t.text == "true" )
        {
            ++_pos;
            return formula::tt();
        }
        if ( t.text == "false" )
        {
            ++_pos;
            return formula::ff();
        }
        if ( t.text == "U" )
            fail( "unexpected 'U'" );
        std::string name = t.text;
        ++_pos;
        if ( peek().kind != tok::at )
            fail( "expected '@' after proposition '" + name + "'" );
        ++_pos;
        if ( peek().kind != tok::number || peek().text.size() > 6 )
            fail( "expected process index" );
        int index = std::stoi( peek().text );
        ++_pos;
        return formula::atom( std::move( name ), index );
    }

    std::vector<token> _tokens;
    std::size_t _pos = 0;
};

} // namespace

formula parse_formula( std::string_view text )
{
    return parser( text ).parse();
}

void check_atoms( const formula& phi, const signature& sig )
{
    for ( const auto& a : atoms( phi ) )
        sig.bit( a.name, a.index );
}

formula parse_formula( std::string_view text, const signature& sig )
{
    formula f = parse_formula( text );
    check_atoms( f, sig );
    return f;
}

std::vector<atom_ref> atoms( const formula& phi )
{
    std::vector<atom_ref> out;
    std::function<void( const formula& )> walk = [ & ]( const formula& f ) {
        switch ( f.kind() )
        {
        case op::tt:
        case op::ff: return;
        case op::atom: out.push_back( { f.name(), f.index() } ); return;
        case op::not_:
        case op::next:
        case op::finally:
        case op::globally: walk( f.child() ); return;
        default:
            walk( f.lhs() );
            walk( f.rhs() );
        }
    };
    walk( phi );
    return out;
}

// ---------------------------------------------------------------------------
// Printing

namespace
{

int precedence( op k )
{
    switch ( k )
    {
    case op::iff: return 1;
    case op::implies: return 2;
    case op::or_: return 3;
    case op::and_: return 4;
    case op::until: return 5;
    case op::not_:
    case op::next:
    case op::finally:
    case op::globally: return 6;
    default: return 7;
    }
}

const char* binary_symbol( op k )
{
    switch ( k )
    {
    case op::iff: return " <-> ";
    case op::implies: return " -> ";
    case op::or_: return " | ";
    case op::and_: return " & ";
    default: return " U ";
    }
}

void print( const formula& f, std::string& out )
{
    auto wrapped = [ & ]( const formula& c, bool parens ) {
        if ( parens )
            out += "(";
        print( c, out );
        if ( parens )
            out += ")";
    };
    const int p = precedence( f.kind() );
    switch ( f.kind() )
    {
    case op::tt: out += "true"; return;
    case op::ff: out += "false"; return;
    case op::atom: out += f.name() + "@" + std::to_string( f.index() ); return;
    case op::not_:
        out += "!";
        wrapped( f.child(), precedence( f.child().kind() ) < p );
        return;
    case op::next:
    case op::finally:
    case op::globally:
        out += f.kind() == op::next ? "X " : f.kind() == op::finally ? "F " : "G ";
        wrapped( f.child(), precedence( f.child().kind() ) < p );
        return;
    default:
    {
        const bool right_assoc = f.kind() == op::implies;
        const int lp = precedence( f.lhs().kind() );
        const int rp = precedence( f.rhs().kind() );
        wrapped( f.lhs(), lp < p || ( lp == p && right_assoc ) );
        out += binary_symbol( f.kind() );
        wrapped( f.rhs(), rp < p || ( rp == p && !right_assoc ) );
    }
    }
}

} // namespace

std::string to_string( const formula& phi )
{
    std::string out;
    print( phi, out );
    return out;
}

// ---------------------------------------------------------------------------
// Rewrites

namespace
{

formula map_atoms( const formula& f, const std::function<formula( const formula& )>& fn )
{
    switch ( f.kind() )
    {
    case op::tt:
    case op::ff: return f;
    case op::atom: return fn( f );
    case op::not_: return formula::not_( map_atoms( f.child(), fn ) );
    case op::next: return formula::next( map_atoms( f.child(), fn ) );
    case op::finally: return formula::finally( map_atoms( f.child(), fn ) );
    case op::globally: return formula::globally( map_atoms( f.child(), fn ) );
    case op::and_: return formula::and_( map_atoms( f.lhs(), fn ), map_atoms( f.rhs(), fn ) );
    case op::or_: return formula::or_( map_atoms( f.lhs(), fn ), map_atoms( f.rhs(), fn ) );
    case op::implies: return formula::implies( map_atoms( f.lhs(), fn ), map_atoms( f.rhs(), fn ) );
    case op::iff: return formula::iff( map_atoms( f.lhs(), fn ), map_atoms( f.rhs(), fn ) );
    case op::until: return formula::until( map_atoms( f.lhs(), fn ), map_atoms( f.rhs(), fn ) );
    }
    return f;
}

} // namespace

formula rot_formula( const formula& phi, int k, int n )
{
    return map_atoms( phi, [ & ]( const formula& a ) {
        return formula::atom( a.name(), ( ( a.index() + k ) % n + n ) % n );
    } );
}

formula strengthen_spec( const formula& phi, int n )
{
    std::vector<formula> parts{ phi };
    for ( int k = 1; k < n; ++k )
        parts.push_back( rot_formula( phi, k, n ) );
    return conjunction( parts );
}

formula sym_formula( const std::vector<std::string>& props, int d, int n )
{
    if ( d < 1 || n % d != 0 )
        throw error( std::to_string( d ) + " does not divide " + std::to_string( n ) );
    const int shift = n / d;
    std::vector<formula> parts;
    for ( const auto& a : props )
        for ( int j = 0; j < n; ++j )
            parts.push_back( formula::iff( formula::atom( a, j ), formula::atom( a, ( j + shift ) % n ) ) );
    return conjunction( parts );
}

formula outcond_formula( const architecture& arch )
{
    const int n = arch.processes();
    std::vector<formula> parts;
    for ( int d = 1; d <= n; ++d )
    {
        if ( n % d != 0 )
            continue;
        // sym(., 1, n) is valid; it is written as the constant.
        const formula in = d == 1 ? formula::tt() : sym_formula( arch.local_inputs(), d, n );
        const formula not_out = d == 1 ? formula::ff() : formula::not_( sym_formula( arch.outputs(), d, n ) );
        parts.push_back( formula::not_( formula::until( in, not_out ) ) );
    }
    return conjunction( parts );
}

// ---------------------------------------------------------------------------
// Lasso evaluation

namespace
{

class lasso_evaluator
{
public:
    lasso_evaluator( const signature& sig, const lasso_word& w ) : _sig{ sig }, _w{ w }
    {
        if ( w.loop.empty() )
            throw error( "lasso loop must be nonempty" );
    }

    std::vector<bool> eval( const formula& f )
    {
        const std::size_t len = _w.length();
        std::vector<bool> out( len );
        switch ( f.kind() )
        {
        case op::tt: out.assign( len, true ); break;
        case op::ff: break;
        case op::atom:
        {
            const int bit = _sig.bit( f.name(), f.index() );
            for ( std::size_t i = 0; i < len; ++i )
                out[ i ] = _w.at( i ).contains( bit );
            break;
        }
        case op::not_:
        {
            auto a = eval( f.child() );
            for ( std::size_t i = 0; i < len; ++i )
                out[ i ] = !a[ i ];
            break;
        }
        case op::and_:
        case op::or_:
        case op::implies:
        case op::iff:
        {
            auto a = eval( f.lhs() );
            auto b = eval( f.rhs() );
            for ( std::size_t i = 0; i < len; ++i )
            {
                switch ( f.kind() )
                {
                case op::and_: out[ i ] = a[ i ] && b[ i ]; break;
                case op::or_: out[ i ] = a[ i ] || b[ i ]; break;
                case op::implies: out[ i ] = !a[ i ] || b[ i ]; break;
                default: out[ i ] = a[ i ] == b[ i ];
                }
            }
            break;
        }
        case op::next:
        {
            auto a = eval( f.child() );
            for ( std::size_t i = 0; i < len; ++i )
                out[ i ] = a[ _w.successor( i ) ];
            break;
        }
        case op::finally:
        {
            std::vector<bool> all( len, true );
            out = until( all, eval( f.child() ) );
            break;
        }
        case op::globally:
        {
            // G a = !F !a
            auto a = eval( f.child() );
            std::vector<bool> not_a( len );
            for ( std::size_t i = 0; i < len; ++i )
                not_a[ i ] = !a[ i ];
            out = until( std::vector<bool>( len, true ), not_a );
            out.flip();
            break;
        }
        case op::until: out = until( eval( f.lhs() ), eval( f.rhs() ) ); break;
        }
        return out;
    }

private:
    // Least fixpoint of u = b | (a & X u): two backward passes over the loop
    // settle every loop position, one pass over the prefix finishes.
    std::vector<bool> until( const std::vector<bool>& a, const std::vector<bool>& b ) const
    {
        const std::size_t len = _w.length();
        const std::size_t start = _w.prefix.size();
        std::vector<bool> u( len, false );
        for ( int pass = 0; pass < 2; ++pass )
            for ( std::size_t i = len; i-- > start; )
                u[ i ] = b[ i ] || ( a[ i ] && u[ _w.successor( i ) ] );
        for ( std::size_t i = start; i-- > 0; )
            u[ i ] = b[ i ] || ( a[ i ] && u[ i + 1 ] );
        return u;
    }

    const signature& _sig;
    const lasso_word& _w;
};

} // namespace

std::vector<bool> eval_positions( const signature& sig, const lasso_word& w, const formula& phi )
{
    return lasso_evaluator( sig, w ).eval( phi );
}

bool eval_lasso( const signature& sig, const lasso_word& w, const formula& phi )
{
    return eval_positions( sig, w, phi ).front();
}

} // namespace symsynth
