// Minimal DIMACS front end for the embedded solver, in the usual competition
// output format: prints `s SATISFIABLE` plus `v` lines (exit 10) or
// `s UNSATISFIABLE` (exit 20).

#include <symsynth/sat.hpp>
#include <symsynth/spec_file.hpp>

#include <iostream>

int main( int argc, char** argv )
{
    if ( argc != 2 )
    {
        std::cerr << "usage: symsynth-dimacs FILE.cnf\n";
        return 1;
    }
    try
    {
        const auto problem = symsynth::parse_dimacs( symsynth::read_text_file( argv[ 1 ] ) );
        symsynth::cdcl_solver solver;
        const auto model = solver.solve( problem.formula );
        if ( !model )
        {
            std::cout << "s UNSATISFIABLE\n";
            return 20;
        }
        std::cout << "s SATISFIABLE\n";
        std::string line = "v";
        for ( int v = 1; v <= problem.formula.num_vars(); ++v )
        {
            const std::string lit = " " + std::to_string( ( *model )[ v ] ? v : -v );
            if ( line.size() + lit.size() > 78 )
            {
                std::cout << line << "\n";
                line = "v";
            }
            line += lit;
        }
        std::cout << line << " 0\n";
        return 10;
    }
    catch ( const std::exception& e )
    {
        std::cerr << "symsynth-dimacs: " << e.what() << "\n";
        return 1;
    }
}
