#pragma once

#include <symsynth/formula.hpp>
#include <symsynth/valuation.hpp>

#include <string>
#include <vector>

namespace symsynth
{

// Encodes letters over signals x_1..x_n as blocks of 2(n+1) letters over a
// single carrier: positions 0 and 1 hold the carrier (the start marker),
// position 2j is empty and position 2j+1 holds the carrier iff x_j holds.
class compression_scheme
{
public:
    explicit compression_scheme( std::vector<std::string> signals, std::string carrier = "chi" );

    const std::vector<std::string>& signals() const { return _signals; }
    const std::string& carrier() const { return _carrier; }
    int block_length() const { return 2 * ( static_cast<int>( _signals.size() ) + 1 ); }

    // Signals as index-0 propositions of a one-process universe.
    const signature& source_sig() const { return _source; }
    const signature& target_sig() const { return _target; }

private:
    std::vector<std::string> _signals;
    std::string _carrier;
    signature _source;
    signature _target;
};

word compress_word( const word& w, const compression_scheme& s );
lasso_word compress_word( const lasso_word& w, const compression_scheme& s );
// Inverse on well-formed, block-aligned words; throws otherwise.
lasso_word decompress_word( const lasso_word& w, const compression_scheme& s );

// Rewrites F a to true U a and G a to !(true U !a).
formula reduce_to_until( const formula& psi );

// Throws on F and G; reduce first.
formula compress_formula( const formula& psi, const compression_scheme& s );

// carrier & X carrier & X X !carrier
formula start_marker( const std::string& p );

struct validity_formulas
{
    // From a start marker, the next marker is not exactly one block later
    // or an even slot is set.
    formula invalid1;
    // The word does not open with a start marker.
    formula invalid2;
    // Well-formedness of the carrier as a G formula.
    formula correct;
};

validity_formulas make_validity_formulas( const compression_scheme& s );
// Well-formedness of proposition p (index 0) under the block layout of s.
formula correct_formula( const compression_scheme& s, const std::string& p );

} // namespace symsynth
