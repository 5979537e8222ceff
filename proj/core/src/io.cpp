#include "trunckit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace trunckit {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

struct LineReader {
    std::istringstream in;
    int line_no = 0;
    std::string current;

    explicit LineReader(const std::string& text) : in(text) {}

    // next non-empty, non-comment line
    bool next() {
        while (std::getline(in, current)) {
            ++line_no;
            auto hash = current.find('#');
            if (hash != std::string::npos) current.erase(hash);
            bool blank = true;
            for (char c : current) blank &= std::isspace(static_cast<unsigned char>(c)) != 0;
            if (!blank) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_no); }
};

int to_int(LineReader& r, const std::string& tok) {
    try {
        std::size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size()) r.fail("bad integer '" + tok + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        r.fail("bad integer '" + tok + "'");
    }
}

double to_double(LineReader& r, const std::string& tok) {
    try {
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) r.fail("bad number '" + tok + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        r.fail("bad number '" + tok + "'");
    }
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

}  // namespace

TriangulationFile parse_triangulation(const std::string& text) {
    LineReader r(text);
    TriangulationFile file;

    if (!r.next()) r.fail("empty file");
    auto head = tokens(r.current);
    if (head.size() != 2 || head[0] != "trunckit") r.fail("expected header 'trunckit <version>'");
    file.version = to_int(r, head[1]);
    if (file.version != 1) r.fail("unsupported format version");

    int ntet = -1;
    while (r.next()) {
        auto tk = tokens(r.current);
        if (tk[0] == "name") {
            if (tk.size() != 2) r.fail("expected 'name <token>'");
            file.name = tk[1];
        } else if (tk[0] == "tetrahedra") {
            if (tk.size() != 2) r.fail("expected 'tetrahedra <count>'");
            ntet = to_int(r, tk[1]);
            if (ntet <= 0) r.fail("tetrahedron count must be positive");
            break;
        } else {
            r.fail("unexpected directive '" + tk[0] + "'");
        }
    }
    if (ntet < 0) r.fail("missing 'tetrahedra' directive");
    file.tri.tets.resize(ntet);

    for (int t = 0; t < ntet; ++t) {
        if (!r.next()) r.fail("unexpected end of file in tetrahedron block");
        auto tk = tokens(r.current);
        if (tk.size() != 6 || tk[0] != "tet" || tk[2] != "ideal" || tk[4] != "zero")
            r.fail("expected 'tet <i> ideal <mask> zero <mask>'");
        if (to_int(r, tk[1]) != t) r.fail("tetrahedra must appear in order");
        int imask = to_int(r, tk[3]);
        int zmask = to_int(r, tk[5]);
        if (imask < 0 || imask > 15) r.fail("ideal mask out of range");
        if (zmask < 0 || zmask > 63) r.fail("zero mask out of range");
        file.tri.tets[t].comb.ideal_mask = static_cast<std::uint8_t>(imask);
        file.tri.tets[t].comb.zero_mask = static_cast<std::uint8_t>(zmask);
        for (int f = 0; f < 4; ++f) {
            if (!r.next()) r.fail("unexpected end of file in gluing block");
            auto gk = tokens(r.current);
            if (gk.size() != 7 || gk[0] != "face")
                r.fail("expected 'face <f>: <tet> <face> <a> <b> <c>'");
            if (gk[1] != std::to_string(f) + ":") r.fail("faces must appear in order 0..3");
            FaceGluing g;
            g.tet = to_int(r, gk[2]);
            int f2 = to_int(r, gk[3]);
            if (g.tet < 0 || g.tet >= ntet) r.fail("gluing target out of range");
            if (f2 < 0 || f2 > 3) r.fail("gluing face out of range");
            auto fv = face_vertices(f);
            std::array<bool, 4> used{};
            for (int k = 0; k < 3; ++k) {
                int img = to_int(r, gk[4 + k]);
                if (img < 0 || img > 3 || img == f2 || used[img])
                    r.fail("bad face permutation image");
                used[img] = true;
                g.perm[fv[k]] = static_cast<std::uint8_t>(img);
            }
            g.perm[f] = static_cast<std::uint8_t>(f2);
            file.tri.tets[t].glue[f] = g;
        }
    }

    while (r.next()) {
        auto tk = tokens(r.current);
        if (tk[0] == "angles") {
            std::vector<TetAngles> angles(ntet);
            for (int t = 0; t < ntet; ++t) {
                if (!r.next()) r.fail("unexpected end of file in angles block");
                auto ak = tokens(r.current);
                if (ak.size() != 7) r.fail("expected '<tet> <6 angles>'");
                if (to_int(r, ak[0]) != t) r.fail("angle rows must appear in order");
                for (int e = 0; e < 6; ++e) angles[t][e] = to_double(r, ak[1 + e]);
            }
            file.angles = std::move(angles);
        } else if (tk[0] == "cross-section") {
            if (tk.size() != 2) r.fail("expected 'cross-section <count>'");
            int n = to_int(r, tk[1]);
            std::vector<double> hs(n);
            for (int c = 0; c < n; ++c) {
                if (!r.next()) r.fail("unexpected end of file in cross-section block");
                auto ck = tokens(r.current);
                if (ck.size() != 3 || ck[0] != "cusp") r.fail("expected 'cusp <i> <height>'");
                if (to_int(r, ck[1]) != c) r.fail("cusp rows must appear in order");
                hs[c] = to_double(r, ck[2]);
            }
            file.cusp_heights = std::move(hs);
        } else {
            r.fail("unexpected directive '" + tk[0] + "'");
        }
    }
    return file;
}

TriangulationFile load_triangulation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_triangulation(ss.str());
}

std::string serialize_triangulation(const TriangulationFile& file) {
    std::ostringstream os;
    os << "trunckit " << file.version << "\n";
    os << "name " << file.name << "\n";
    os << "tetrahedra " << file.tri.size() << "\n";
    for (int t = 0; t < file.tri.size(); ++t) {
        const TetData& td = file.tri.tets[t];
        os << "tet " << t << " ideal " << int(td.comb.ideal_mask) << " zero "
           << int(td.comb.zero_mask) << "\n";
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = td.glue[f];
            os << "  face " << f << ": " << g.tet << " " << g.image_face(f);
            for (int v : face_vertices(f)) os << " " << int(g.perm[v]);
            os << "\n";
        }
    }
    if (file.angles) {
        os << "angles\n";
        for (int t = 0; t < file.tri.size(); ++t) {
            os << "  " << t;
            for (int e = 0; e < 6; ++e) os << " " << format_double((*file.angles)[t][e]);
            os << "\n";
        }
    }
    if (file.cusp_heights) {
        os << "cross-section " << file.cusp_heights->size() << "\n";
        for (std::size_t c = 0; c < file.cusp_heights->size(); ++c)
            os << "  cusp " << c << " " << format_double((*file.cusp_heights)[c]) << "\n";
    }
    return os.str();
}

void save_triangulation(const TriangulationFile& file, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << serialize_triangulation(file);
}

}  // namespace trunckit
