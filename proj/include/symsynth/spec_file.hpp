#pragma once

#include <symsynth/architecture.hpp>
#include <symsynth/formula.hpp>

#include <string>
#include <string_view>

namespace symsynth
{

// Text format, one field per line, `#` starts a comment:
//
//   n: 2
//   local_inputs: r
//   outputs: g
//   spec: G (r@0 -> F g@0)
struct spec_file
{
    architecture arch;
    formula phi;
};

// Throws parse_error with the line and column of the offending text.
spec_file parse_spec_file( std::string_view text );
spec_file load_spec_file( const std::string& path );

std::string read_text_file( const std::string& path );

} // namespace symsynth
