#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace symsynth
{

using prop_mask = std::uint64_t;

class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Raised by every text parser. Positions are 1-based.
class parse_error : public error
{
public:
    parse_error( const std::string& what, int line, int column )
        : error( what ), _line{ line }, _column{ column }
    {}

    int line() const { return _line; }
    int column() const { return _column; }

private:
    int _line;
    int _column;
};

// The indexed proposition universe names x {0, ..., n-1}.
//
// Every (name, index) pair owns one bit. The layout is process-major:
// bit = index * |names| + position-of-name. With this layout the tuple
// order used for normalization is the plain bit order (bit 0 first), and
// rotating by k is a cyclic shift by k * |names| bits.
class signature
{
public:
    signature() = default;
    signature( std::vector<std::string> names, int processes );

    const std::vector<std::string>& names() const { return _names; }
    int processes() const { return _processes; }
    int width() const { return static_cast<int>( _names.size() ) * _processes; }

    std::optional<int> position( std::string_view name ) const;
    int bit( int position, int index ) const { return index * static_cast<int>( _names.size() ) + position; }
    // Throws on unknown names and out-of-range indices.
    int bit( std::string_view name, int index ) const;

    int position_of_bit( int bit ) const { return bit % static_cast<int>( _names.size() ); }
    int index_of_bit( int bit ) const { return bit / static_cast<int>( _names.size() ); }
    std::string prop_name( int bit ) const;

    prop_mask full_mask() const;
    prop_mask name_mask( int position ) const;
    prop_mask index_mask( int index ) const;
    prop_mask names_mask( const std::vector<std::string>& names ) const;

    friend bool operator==( const signature&, const signature& ) = default;

private:
    std::vector<std::string> _names;
    int _processes = 1;
};

struct valuation
{
    prop_mask bits = 0;

    bool contains( int bit ) const { return ( bits >> bit ) & 1u; }

    friend bool operator==( valuation, valuation ) = default;
    friend valuation operator|( valuation a, valuation b ) { return { a.bits | b.bits }; }
    friend valuation operator&( valuation a, prop_mask m ) { return { a.bits & m }; }
};

using word = std::vector<valuation>;

struct lasso_word
{
    word prefix;
    word loop;

    std::size_t length() const { return prefix.size() + loop.size(); }
    const valuation& at( std::size_t position ) const;
    std::size_t successor( std::size_t position ) const;

    friend bool operator==( const lasso_word&, const lasso_word& ) = default;
};

// Rotation: (p, j) -> (p, (j + k) mod n), with a non-negative modulus.
valuation rot( const signature& sig, valuation v, int k );
word rot( const signature& sig, const word& w, int k );
lasso_word rot( const signature& sig, const lasso_word& w, int k );

// Lexicographic order on the bit tuple (index 0 bits first, absent < present).
std::strong_ordering compare_valuations( valuation a, valuation b );
// Letterwise lexicographic order on words of equal length.
std::strong_ordering compare_words( const word& a, const word& b );

struct normalized_word
{
    word normalized;
    int shift = 0;
};

// The minimal rotation of t and the smallest shift reaching it.
normalized_word normalize_word( const signature& sig, const word& t );

// Number of j in 0..n-1 with rot(x, j) = x.
int rep( const signature& sig, valuation x );
// gcd of n and rep of every letter: the number of neutral rotations of w.
int reps( const signature& sig, const word& w );
int reps_extend( const signature& sig, int reps_so_far, valuation letter );

// Enumerates all subsets of `mask` in increasing order of their packed index.
std::vector<valuation> enumerate_letters( prop_mask mask );

// Text syntax: `{r@0,g@1}`; a bare name means index 0.
std::string format_valuation( const signature& sig, valuation v );
std::string format_word( const signature& sig, const word& w );
std::string format_lasso( const signature& sig, const lasso_word& w );

using raw_prop = std::pair<std::string, int>;
using raw_valuation = std::vector<raw_prop>;

struct raw_lasso
{
    std::vector<raw_valuation> prefix;
    std::vector<raw_valuation> loop;
};

std::vector<raw_valuation> parse_raw_word( std::string_view text );
raw_lasso parse_raw_lasso( std::string_view text );

valuation resolve( const signature& sig, const raw_valuation& raw );
valuation parse_valuation( std::string_view text, const signature& sig );
word parse_word( std::string_view text, const signature& sig );
lasso_word parse_lasso( std::string_view text, const signature& sig );

} // namespace symsynth
