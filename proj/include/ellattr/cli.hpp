#ifndef ELLATTR_CLI_HPP
#define ELLATTR_CLI_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ellattr/elliptic.hpp"
#include "ellattr/polynomials.hpp"
#include "ellattr/ratmap.hpp"

namespace ellattr::cli {

/// Parsed and validated system-definition file: the map, its curve, and
/// optional run defaults.
struct system_spec {
    int degree = 0;
    std::array<std::string, 3> map_text;
    rational_map map;

    enum class curve_kind { weierstrass_lattice, polynomial };
    curve_kind kind = curve_kind::weierstrass_lattice;
    std::optional<curve_embedding> embedding;  // lattice curves
    hom_poly curve_poly;                       // always set (from embedding or text)

    // optional defaults
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<int> horizon;
    std::optional<double> eps;
    std::optional<int> consecutive;
};

/// Load a system spec from a JSON document. Throws io_error on unreadable
/// files, schema_error (with JSON-pointer) on invalid documents, and the
/// polynomial parser errors on bad map text.
system_spec load_spec(const std::string& path);

/// Run one CLI invocation. argv excludes the program name. Writes the JSON
/// run report to `out` and diagnostics to `err`.
/// Exit codes: 0 success, 1 usage/parse errors, 2 hypothesis-verification
/// failure (report still emitted).
int execute(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace ellattr::cli

#endif
