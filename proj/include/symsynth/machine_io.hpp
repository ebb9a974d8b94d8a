#pragma once

#include <symsynth/moore.hpp>

#include <string>
#include <string_view>

namespace symsynth
{

// JSON layout: n, inputs, outputs, initial, states [{id, label}],
// transitions [{from, input, to}]. Process machines list their outputs by
// bare name; global machines use name@index everywhere. The universe is
// rebuilt as (input names ++ output names) x n.
std::string machine_to_json( const moore_machine& m );
// Throws parse_error on malformed text and error on inconsistent tables.
moore_machine machine_from_json( std::string_view text );

std::string machine_to_dot( const moore_machine& m );

} // namespace symsynth
