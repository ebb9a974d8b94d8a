#pragma once

#include <symsynth/valuation.hpp>

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace symsynth
{

enum class op
{
    tt,
    ff,
    atom,
    not_,
    and_,
    or_,
    implies,
    iff,
    next,
    finally,
    globally,
    until
};

// Immutable LTL syntax tree over indexed propositions `name@index`.
// Copies share structure; equality is structural.
class formula
{
public:
    static formula tt();
    static formula ff();
    static formula atom( std::string name, int index );
    static formula not_( formula a );
    static formula and_( formula a, formula b );
    static formula or_( formula a, formula b );
    static formula implies( formula a, formula b );
    static formula iff( formula a, formula b );
    static formula next( formula a );
    static formula finally( formula a );
    static formula globally( formula a );
    static formula until( formula a, formula b );

    op kind() const;
    const std::string& name() const;
    int index() const;
    const formula& lhs() const;
    const formula& rhs() const;
    const formula& child() const { return lhs(); }

    std::size_t size() const;

    friend bool operator==( const formula& a, const formula& b );

private:
    struct node;
    explicit formula( std::shared_ptr<const node> n ) : _node{ std::move( n ) } {}
    std::shared_ptr<const node> _node;
};

// Left-folded conjunction / disjunction; empty lists give true / false.
formula conjunction( const std::vector<formula>& parts );
formula disjunction( const std::vector<formula>& parts );
// X applied `times` times.
formula next_n( formula a, int times );

// Grammar: atoms `ident@uint`, `true`, `false`, unary `! X F G`, then
// `U` (left), `&`, `|`, `->` (right), `<->` (lowest, left).
formula parse_formula( std::string_view text );
// Also checks every atom against the universe.
formula parse_formula( std::string_view text, const signature& sig );
void check_atoms( const formula& phi, const signature& sig );

std::string to_string( const formula& phi );

struct atom_ref
{
    std::string name;
    int index;
};
std::vector<atom_ref> atoms( const formula& phi );

formula rot_formula( const formula& phi, int k, int n );
// phi & rot(phi,1) & ... & rot(phi,n-1).
formula strengthen_spec( const formula& phi, int n );
// Conjunction of (a@j <-> a@(j + n/d mod n)) over a in props, j in 0..n-1.
formula sym_formula( const std::vector<std::string>& props, int d, int n );

class architecture;
// Conjunction over divisors d of n of !(sym(I,d,n) U !sym(O,d,n)).
formula outcond_formula( const architecture& arch );

// Truth of phi at position 0 of prefix . loop^omega.
bool eval_lasso( const signature& sig, const lasso_word& w, const formula& phi );
// Truth at every position 0..length-1.
std::vector<bool> eval_positions( const signature& sig, const lasso_word& w, const formula& phi );

} // namespace symsynth
