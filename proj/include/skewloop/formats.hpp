#pragma once

// Text file formats for curves and surfaces. Human-editable, versioned,
// bit-exact round trip (floats written with 17 significant digits).

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "skewloop/burago.hpp"
#include "skewloop/developable.hpp"
#include "skewloop/loop.hpp"
#include "skewloop/quadric.hpp"
#include "skewloop/trig.hpp"

namespace skewloop {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct LineReader {
    std::istringstream all;
    int line_no = 0;
    explicit LineReader(const std::string& text) : all(text) {}

    // next non-empty, non-comment line split into tokens
    std::optional<std::vector<std::string>> next() {
        std::string line;
        while (std::getline(all, line)) {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            std::istringstream ls(line);
            std::vector<std::string> tokens;
            std::string tok;
            while (ls >> tok) tokens.push_back(tok);
            if (!tokens.empty()) return tokens;
        }
        return std::nullopt;
    }
};

inline double parse_double(const std::string& s, int line) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "expected a number, got '" + s + "'");
    }
}

inline int parse_int(const std::string& s, int line) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "expected an integer, got '" + s + "'");
    }
}

// coefficient rows shared by curve and surface blocks:
//   c0 x y z | c <k> x y z | s <k> x y z
struct CoeffBlock {
    int degree = 0;
    std::vector<double> c0 = {0, 0, 0};
    std::vector<std::vector<double>> a, b;  // [k-1][coord]

    void ensure(int k) {
        while (static_cast<int>(a.size()) < k) {
            a.push_back({0, 0, 0});
            b.push_back({0, 0, 0});
        }
    }

    TrigLoop to_loop() const {
        std::array<TrigPoly, 3> polys;
        for (int c = 0; c < 3; ++c) {
            std::vector<double> av(a.size()), bv(b.size());
            for (size_t k = 0; k < a.size(); ++k) {
                av[k] = a[k][c];
                bv[k] = b[k][c];
            }
            polys[c] = TrigPoly(c0[c], av, bv);
        }
        return TrigLoop(polys[0], polys[1], polys[2]);
    }
};

inline void emit_coeffs(std::ostream& os, const TrigLoop& loop) {
    os << "degree " << loop.degree() << "\n";
    os << "c0";
    for (int c = 0; c < 3; ++c) os << ' ' << format_double(loop.coord(c).c0());
    os << "\n";
    for (int k = 1; k <= loop.degree(); ++k) {
        os << "c " << k;
        for (int c = 0; c < 3; ++c) os << ' ' << format_double(loop.coord(c).a(k));
        os << "\n";
        os << "s " << k;
        for (int c = 0; c < 3; ++c) os << ' ' << format_double(loop.coord(c).b(k));
        os << "\n";
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Curve files
// ---------------------------------------------------------------------------

struct CurveFile {
    std::vector<int> signature;  // quadric signs
    LoopMode mode = LoopMode::Normalized;
    TrigLoop raw;

    QuadricLoop to_quadric_loop() const {
        return QuadricLoop(raw, Quadric(PseudoMetric(signature)), mode);
    }
};

inline std::string write_curve(const CurveFile& c) {
    std::ostringstream os;
    os << "skewloop curve 1\n";
    os << "signature";
    for (int s : c.signature) os << ' ' << (s > 0 ? "+1" : "-1");
    os << "\n";
    os << "mode " << (c.mode == LoopMode::Exact ? "exact" : "normalized") << "\n";
    detail::emit_coeffs(os, c.raw);
    return os.str();
}

inline CurveFile parse_curve(const std::string& text) {
    detail::LineReader rd(text);
    auto header = rd.next();
    if (!header || header->size() != 3 || (*header)[0] != "skewloop" || (*header)[1] != "curve")
        throw ParseError(rd.line_no, "expected header 'skewloop curve 1'");
    if ((*header)[2] != "1") throw ParseError(rd.line_no, "unsupported curve format version");

    CurveFile cf;
    detail::CoeffBlock block;
    bool have_signature = false;
    while (auto tok = rd.next()) {
        const auto& t = *tok;
        if (t[0] == "signature") {
            for (size_t i = 1; i < t.size(); ++i) {
                int v = detail::parse_int(t[i], rd.line_no);
                if (v != 1 && v != -1) throw ParseError(rd.line_no, "signature entries must be +1/-1");
                cf.signature.push_back(v);
            }
            have_signature = true;
        } else if (t[0] == "mode") {
            if (t.size() != 2) throw ParseError(rd.line_no, "mode needs one value");
            if (t[1] == "exact") cf.mode = LoopMode::Exact;
            else if (t[1] == "normalized") cf.mode = LoopMode::Normalized;
            else throw ParseError(rd.line_no, "mode must be 'exact' or 'normalized'");
        } else if (t[0] == "degree") {
            block.degree = detail::parse_int(t.at(1), rd.line_no);
        } else if (t[0] == "c0") {
            if (t.size() != 4) throw ParseError(rd.line_no, "c0 needs 3 values");
            for (int c = 0; c < 3; ++c) block.c0[c] = detail::parse_double(t[c + 1], rd.line_no);
        } else if (t[0] == "c" || t[0] == "s") {
            if (t.size() != 5) throw ParseError(rd.line_no, "harmonic rows need k and 3 values");
            int k = detail::parse_int(t[1], rd.line_no);
            if (k < 1) throw ParseError(rd.line_no, "harmonic index must be >= 1");
            block.ensure(k);
            auto& row = (t[0] == "c") ? block.a[k - 1] : block.b[k - 1];
            for (int c = 0; c < 3; ++c) row[c] = detail::parse_double(t[c + 2], rd.line_no);
        } else {
            throw ParseError(rd.line_no, "unknown directive '" + t[0] + "'");
        }
    }
    if (!have_signature) throw ParseError(rd.line_no, "missing 'signature'");
    cf.raw = block.to_loop();
    return cf;
}

// ---------------------------------------------------------------------------
// Surface files
// ---------------------------------------------------------------------------

struct SurfaceFile {
    std::string kind;  // cylinder | cone | tangent | folded
    Vec3 axis{0, 0, 1}, apex{0, 0, 0};
    double u_lo = 0, u_hi = two_pi, w_lo = -1, w_hi = 1;
    TrigLoop generator;
    double fold_radius = 0.05, dihedral = std::numbers::pi / 3.0;  // folded kind

    DevelopableSurface to_surface() const {
        if (kind == "cylinder")
            return DevelopableSurface::cylinder(generator, axis, u_lo, u_hi, w_lo, w_hi);
        if (kind == "cone") return DevelopableSurface::cone(apex, generator, u_lo, u_hi, w_lo, w_hi);
        if (kind == "tangent")
            return DevelopableSurface::tangent_developable(generator, u_lo, u_hi, w_lo, w_hi);
        if (kind == "folded") return make_ruled_from_folded(burago_fixture(fold_radius, dihedral));
        throw std::invalid_argument("unknown surface kind '" + kind + "'");
    }
};

inline std::string write_surface(const SurfaceFile& s) {
    std::ostringstream os;
    os << "skewloop surface 1\n";
    os << "kind " << s.kind << "\n";
    if (s.kind == "folded") {
        os << "fold-radius " << detail::format_double(s.fold_radius) << "\n";
        os << "dihedral " << detail::format_double(s.dihedral) << "\n";
        return os.str();
    }
    if (s.kind == "cylinder")
        os << "axis " << detail::format_double(s.axis.x) << ' ' << detail::format_double(s.axis.y)
           << ' ' << detail::format_double(s.axis.z) << "\n";
    if (s.kind == "cone")
        os << "apex " << detail::format_double(s.apex.x) << ' ' << detail::format_double(s.apex.y)
           << ' ' << detail::format_double(s.apex.z) << "\n";
    os << "uwindow " << detail::format_double(s.u_lo) << ' ' << detail::format_double(s.u_hi) << "\n";
    os << "wwindow " << detail::format_double(s.w_lo) << ' ' << detail::format_double(s.w_hi) << "\n";
    detail::emit_coeffs(os, s.generator);
    return os.str();
}

inline SurfaceFile parse_surface(const std::string& text) {
    detail::LineReader rd(text);
    auto header = rd.next();
    if (!header || header->size() != 3 || (*header)[0] != "skewloop" || (*header)[1] != "surface")
        throw ParseError(rd.line_no, "expected header 'skewloop surface 1'");
    if ((*header)[2] != "1") throw ParseError(rd.line_no, "unsupported surface format version");

    SurfaceFile sf;
    detail::CoeffBlock block;
    while (auto tok = rd.next()) {
        const auto& t = *tok;
        auto need = [&](size_t n) {
            if (t.size() != n) throw ParseError(rd.line_no, "'" + t[0] + "' needs " +
                                                std::to_string(n - 1) + " values");
        };
        if (t[0] == "kind") {
            need(2);
            sf.kind = t[1];
        } else if (t[0] == "axis") {
            need(4);
            sf.axis = {detail::parse_double(t[1], rd.line_no), detail::parse_double(t[2], rd.line_no),
                       detail::parse_double(t[3], rd.line_no)};
        } else if (t[0] == "apex") {
            need(4);
            sf.apex = {detail::parse_double(t[1], rd.line_no), detail::parse_double(t[2], rd.line_no),
                       detail::parse_double(t[3], rd.line_no)};
        } else if (t[0] == "uwindow") {
            need(3);
            sf.u_lo = detail::parse_double(t[1], rd.line_no);
            sf.u_hi = detail::parse_double(t[2], rd.line_no);
        } else if (t[0] == "wwindow") {
            need(3);
            sf.w_lo = detail::parse_double(t[1], rd.line_no);
            sf.w_hi = detail::parse_double(t[2], rd.line_no);
        } else if (t[0] == "fold-radius") {
            need(2);
            sf.fold_radius = detail::parse_double(t[1], rd.line_no);
        } else if (t[0] == "dihedral") {
            need(2);
            sf.dihedral = detail::parse_double(t[1], rd.line_no);
        } else if (t[0] == "degree") {
            block.degree = detail::parse_int(t.at(1), rd.line_no);
        } else if (t[0] == "c0") {
            need(4);
            for (int c = 0; c < 3; ++c) block.c0[c] = detail::parse_double(t[c + 1], rd.line_no);
        } else if (t[0] == "c" || t[0] == "s") {
            need(5);
            int k = detail::parse_int(t[1], rd.line_no);
            if (k < 1) throw ParseError(rd.line_no, "harmonic index must be >= 1");
            block.ensure(k);
            auto& row = (t[0] == "c") ? block.a[k - 1] : block.b[k - 1];
            for (int c = 0; c < 3; ++c) row[c] = detail::parse_double(t[c + 2], rd.line_no);
        } else {
            throw ParseError(rd.line_no, "unknown directive '" + t[0] + "'");
        }
    }
    if (sf.kind.empty()) throw ParseError(rd.line_no, "missing 'kind'");
    sf.generator = block.to_loop();
    return sf;
}

// ---------------------------------------------------------------------------
// Small file helpers
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

}  // namespace skewloop
