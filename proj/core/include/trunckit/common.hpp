#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace trunckit {

// Centralized tolerances. eps_model guards constructor-level normalization,
// eps_geom is the single threshold shared by all geometric predicates
// (the flip algorithm's convexity test needs one consistent value).
inline constexpr double eps_model = 1e-12;
inline constexpr double eps_geom = 1e-9;

constexpr double pi() { return 3.14159265358979323846; }

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define TRUNCKIT_ERROR(name)                                            \
    struct name : Error {                                               \
        explicit name(const std::string& what = #name) : Error(what) {} \
    }

// lorentz
TRUNCKIT_ERROR(NotUnitSpacelike);
TRUNCKIT_ERROR(NotLightlike);
TRUNCKIT_ERROR(PlanesIntersect);
TRUNCKIT_ERROR(PlanesDisjoint);
TRUNCKIT_ERROR(WrongSide);
TRUNCKIT_ERROR(SameCentre);
TRUNCKIT_ERROR(BadModelPoint);

// tetshape
TRUNCKIT_ERROR(SameEdge);
TRUNCKIT_ERROR(OppositeEdges);
TRUNCKIT_ERROR(NotExceptional);
TRUNCKIT_ERROR(VertexNotIdeal);
TRUNCKIT_ERROR(FormulaDomain);
TRUNCKIT_ERROR(MissingRadius);
TRUNCKIT_ERROR(SingularGram);
TRUNCKIT_ERROR(DegenerateLift);

// triangulation
TRUNCKIT_ERROR(InconsistentGluing);
TRUNCKIT_ERROR(SelfAdjacentFace);
TRUNCKIT_ERROR(WrongValence);
TRUNCKIT_ERROR(ZeroLengthEdge);
TRUNCKIT_ERROR(RepeatedTetrahedra);

// equations
TRUNCKIT_ERROR(TagMismatch);

// canonical
TRUNCKIT_ERROR(DevelopmentOverflow);
TRUNCKIT_ERROR(NotApplicable);

// cli
struct ParseError : Error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& what, int line_, int column_ = 0)
        : Error(what), line(line_), column(column_) {}
};

#undef TRUNCKIT_ERROR

// Parallelism cap shared by the few parallel loops in the library.
// Reads TRUNCKIT_THREADS once; 0 or unset means hardware concurrency.
unsigned max_threads();

// Runs fn(i) for i in [0, n). Falls back to a serial loop when the
// range is small or the cap is 1.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace trunckit
