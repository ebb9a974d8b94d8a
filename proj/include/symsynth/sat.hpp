#pragma once

#include <symsynth/valuation.hpp>

#include <memory>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

namespace symsynth
{

class solver_error : public error
{
public:
    using error::error;
};

// Raised by a solver whose stop token was triggered mid-search.
class solver_interrupted : public error
{
public:
    solver_interrupted() : error( "SAT search interrupted" ) {}
};

// Clause database with DIMACS-style literals: +v / -v for v >= 1.
class cnf
{
public:
    int new_var() { return ++_vars; }
    int num_vars() const { return _vars; }
    void add( std::vector<int> clause );
    const std::vector<std::vector<int>>& clauses() const { return _clauses; }

    std::string to_dimacs() const;

private:
    int _vars = 0;
    std::vector<std::vector<int>> _clauses;
};

// model[v] is the value of variable v; index 0 is unused.
using sat_model = std::vector<bool>;

bool satisfies( const cnf& f, const sat_model& model );

class sat_solver
{
public:
    virtual ~sat_solver() = default;
    // nullopt means unsatisfiable.
    std::optional<sat_model> solve( const cnf& f ) { return solve( f, {} ); }
    // Throws solver_interrupted once `stop` is requested. Implementations
    // must allow concurrent calls.
    virtual std::optional<sat_model> solve( const cnf& f, std::stop_token stop ) = 0;
    virtual std::string name() const = 0;
};

// Conflict-driven clause learning: two watched literals, first-UIP learning,
// activity-ordered decisions and Luby restarts. Fully deterministic.
class cdcl_solver : public sat_solver
{
public:
    using sat_solver::solve;
    std::optional<sat_model> solve( const cnf& f, std::stop_token stop ) override;
    std::string name() const override { return "embedded"; }
};

// Runs `path FILE` on a DIMACS file and reads the `s` / `v` lines of the
// standard competition output format.
class external_solver : public sat_solver
{
public:
    explicit external_solver( std::string path ) : _path{ std::move( path ) } {}
    using sat_solver::solve;
    std::optional<sat_model> solve( const cnf& f, std::stop_token stop ) override;
    std::string name() const override { return _path; }

private:
    std::string _path;
};

// Empty path: consult SYMSYNTH_SAT, then fall back to the embedded solver.
std::unique_ptr<sat_solver> make_solver( const std::string& path = "" );

struct dimacs_problem
{
    cnf formula;
    int declared_clauses = 0;
};

dimacs_problem parse_dimacs( std::string_view text );
// Parses solver output; `vars` sizes the model.
std::optional<sat_model> parse_solver_output( std::string_view text, int vars );

} // namespace symsynth
