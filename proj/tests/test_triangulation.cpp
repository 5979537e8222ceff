#include <doctest.h>

#include <random>
#include <set>

#include "trunckit/io.hpp"
#include "trunckit/triangulation.hpp"

using namespace trunckit;

namespace {

Triangulation fixture(const std::string& name) {
    return load_triangulation(std::string(TRUNCKIT_FIXTURE_DIR) + "/" + name).tri;
}

std::mt19937_64 rng(424242);

// random relabelling: permute tetrahedra and vertices
Triangulation shuffled(const Triangulation& tri) {
    const int n = tri.size();
    std::vector<int> tp(n);
    for (int i = 0; i < n; ++i) tp[i] = i;
    std::shuffle(tp.begin(), tp.end(), rng);
    std::vector<std::array<std::uint8_t, 4>> vp(n);
    for (int t = 0; t < n; ++t) {
        vp[t] = {0, 1, 2, 3};
        std::shuffle(vp[t].begin(), vp[t].end(), rng);
    }
    Triangulation out;
    out.tets.resize(n);
    for (int t = 0; t < n; ++t) {
        const TetData& src = tri.tets[t];
        TetData& dst = out.tets[tp[t]];
        for (int v = 0; v < 4; ++v)
            if (src.comb.ideal(v)) dst.comb.ideal_mask |= 1u << vp[t][v];
        for (int e = 0; e < 6; ++e)
            if (src.comb.zero(e))
                dst.comb.zero_mask |=
                    1u << edge_index(vp[t][edge_table[e][0]], vp[t][edge_table[e][1]]);
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = src.glue[f];
            FaceGluing ng;
            ng.tet = tp[g.tet];
            for (int v = 0; v < 4; ++v) ng.perm[vp[t][v]] = vp[g.tet][g.perm[v]];
            dst.glue[vp[t][f]] = ng;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("figure-eight classes: two valence-6 edges, one torus cusp") {
    Triangulation tri = fixture("fig8.tkt");
    Classes cls = build_classes(tri);
    REQUIRE(cls.edges.size() == 2);
    CHECK(cls.edges[0].valence() == 6);
    CHECK(cls.edges[1].valence() == 6);
    REQUIRE(cls.verts.size() == 1);
    CHECK(cls.verts[0].ideal);
    CHECK(cls.verts[0].link_chi == 0);
    CHECK(boundary_euler_check(tri, cls).empty());  // no truncated vertices
}

TEST_CASE("one tetrahedron with paired faces partitions six slots") {
    Triangulation tri = fixture("sphere.tkt");
    Classes cls = build_classes(tri);
    int total = 0;
    for (const auto& ec : cls.edges) total += ec.valence();
    CHECK(total == 6);
    std::set<std::pair<int, int>> seen;
    for (const auto& ec : cls.edges)
        for (const auto& inc : ec.inc) seen.insert({inc.tet, inc.slot});
    CHECK(seen.size() == 6);  // every slot in exactly one class
}

TEST_CASE("boundary Euler characteristics") {
    // compact 2-tet example: genus-2 boundary
    Triangulation tri = fixture("fujii2.tkt");
    Classes cls = build_classes(tri);
    auto chi = boundary_euler_check(tri, cls);
    REQUIRE(chi.size() == 1);
    CHECK(chi[0] == -2);
    CHECK(validate(tri).ok);

    // sphere boundary components are rejected by validation
    Triangulation sph = fixture("sphere.tkt");
    Classes scls = build_classes(sph);
    auto schi = boundary_euler_check(sph, scls);
    REQUIRE_FALSE(schi.empty());
    for (int c : schi) CHECK(c == 2);
    CHECK_FALSE(validate(sph).ok);
}

TEST_CASE("flag mismatches across gluings are rejected") {
    Triangulation tri = fixture("fig8.tkt");
    tri.tets[0].comb.ideal_mask = 0x07;  // drop one ideal flag
    CHECK_THROWS_AS(build_classes(tri), InconsistentGluing);

    Triangulation tri2 = fixture("fujii2.tkt");
    tri2.tets[0].comb.zero_mask = 1;  // zero flag not class-constant
    CHECK_THROWS_AS(build_classes(tri2), InconsistentGluing);
}

TEST_CASE("non-involutive gluing is rejected") {
    auto file = load_triangulation(std::string(TRUNCKIT_FIXTURE_DIR) + "/badglue.tkt");
    CHECK_THROWS_AS(build_classes(file.tri), InconsistentGluing);
    CHECK_FALSE(validate(file.tri).ok);
}

TEST_CASE("arc view round trip") {
    for (const char* name : {"fig8.tkt", "fujii2.tkt", "mixed3.tkt", "sigma2.tkt"}) {
        Triangulation tri = fixture(name);
        ArcView av = to_arc_view(tri);
        Triangulation back = from_arc_view(av);
        CHECK(back == tri);
        // and the other composition
        ArcView av2 = to_arc_view(back);
        CHECK(av2.glue == av.glue);
        CHECK(av2.arc_mask == av.arc_mask);
    }
    // no zero edges and no truncated vertices -> empty arc set
    ArcView av = to_arc_view(fixture("fig8.tkt"));
    for (auto m : av.arc_mask) CHECK(m == 0);
    // a vertex class touched by an arc end stays truncated
    Triangulation sig = fixture("sigma2.tkt");
    Triangulation back = from_arc_view(to_arc_view(sig));
    Classes cls = build_classes(back);
    for (const auto& ec : cls.edges) {
        if (!ec.zero) continue;
        CHECK_FALSE(cls.verts[ec.end_vertex_class[0]].ideal);
        CHECK_FALSE(cls.verts[ec.end_vertex_class[1]].ideal);
    }
}

TEST_CASE("two-to-three move bookkeeping") {
    Triangulation tri = fixture("fig8.tkt");
    Classes before = build_classes(tri);
    auto bchi = boundary_euler_check(tri, before);

    MoveResult mv = move_two_three(tri, 0, 0);
    CHECK(mv.tri.size() == tri.size() + 1);
    Classes after = build_classes(mv.tri);  // re-validation passes
    auto achi = boundary_euler_check(mv.tri, after);
    CHECK(achi == bchi);

    // the new edge class has valence 3
    int c = after.edge_class_of[mv.new_edge_tet][mv.new_edge_slot];
    CHECK(after.edges[c].valence() == 3);
    CHECK_FALSE(after.edges[c].zero);

    // vertex class count is preserved, edge classes grow by one
    CHECK(after.verts.size() == before.verts.size());
    CHECK(after.edges.size() == before.edges.size() + 1);
}

TEST_CASE("self-adjacent faces cannot be flipped") {
    // nogeo.tkt's tet 0 face 0 is glued to tet 0 itself
    Triangulation tri = fixture("nogeo.tkt");
    REQUIRE(tri.tets[0].glue[0].tet == 0);
    CHECK_THROWS_AS(move_two_three(tri, 0, 0), SelfAdjacentFace);
}

TEST_CASE("three-to-two preconditions") {
    Triangulation tri = fixture("fig8.tkt");
    Classes cls = build_classes(tri);
    // valence-6 classes are rejected
    CHECK_THROWS_AS(move_three_two(tri, cls, 0), WrongValence);
}

TEST_CASE("move round trip returns an isomorphic triangulation") {
    for (const char* name : {"fig8.tkt", "fujii2.tkt", "mixed3.tkt"}) {
        Triangulation tri = fixture(name);
        std::string sig0 = isomorphism_signature(tri);
        for (int t = 0; t < tri.size(); ++t) {
            for (int f = 0; f < 4; ++f) {
                const FaceGluing& g = tri.tets[t].glue[f];
                if (g.tet == t) continue;
                MoveResult mv = move_two_three(tri, t, f);
                Classes cls = build_classes(mv.tri);
                int c = cls.edge_class_of[mv.new_edge_tet][mv.new_edge_slot];
                REQUIRE(cls.edges[c].valence() == 3);
                MoveResult back = move_three_two(mv.tri, cls, c);
                CHECK(build_classes(back.tri).edges.size() ==
                      build_classes(tri).edges.size());
                CHECK(isomorphism_signature(back.tri) == sig0);
            }
        }
    }
}

TEST_CASE("isosig is a complete isomorphism invariant on the corpus") {
    std::vector<std::string> names{"fig8.tkt", "fujii2.tkt", "mixed3.tkt", "nogeo.tkt",
                                   "sigma2.tkt"};
    std::vector<std::string> sigs;
    for (const auto& n : names) {
        Triangulation tri = fixture(n);
        std::string sig = isomorphism_signature(tri);
        // relabelled copies give identical strings
        for (int k = 0; k < 5; ++k) CHECK(isomorphism_signature(shuffled(tri)) == sig);
        // the canonical relabelling is itself in the class
        CHECK(isomorphism_signature(canonical_relabel(tri)) == sig);
        sigs.push_back(sig);
    }
    // distinct fixtures get distinct strings
    std::set<std::string> uniq(sigs.begin(), sigs.end());
    CHECK(uniq.size() == sigs.size());
}

TEST_CASE("boundary-parallel warnings stay advisory") {
    Triangulation tri = fixture("fujii2.tkt");
    Classes cls = build_classes(tri);
    auto warnings = detect_boundary_parallel_flags(tri, cls);
    // the compact example has every edge on the single boundary component;
    // warnings may fire but validation still passes
    CHECK(validate(tri).ok);
    (void)warnings;
    // all-ideal: nothing to warn about
    Triangulation f8 = fixture("fig8.tkt");
    Classes c8 = build_classes(f8);
    CHECK(detect_boundary_parallel_flags(f8, c8).empty());
}
