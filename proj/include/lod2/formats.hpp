#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lod2/core.hpp"
#include "lod2/geotransform.hpp"
#include "lod2/raster.hpp"

namespace lod2 {

// ---- helpers ---------------------------------------------------------------

namespace detail {

inline std::ifstream open_in(const std::string& path, bool binary) {
    std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
    if (!f) throw IoFailure("cannot open for reading: " + path);
    return f;
}

inline std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f) throw IoFailure("cannot open for writing: " + path);
    return f;
}

inline long offset_of(std::istream& s) {
    auto p = s.tellg();
    return p < 0 ? -1 : static_cast<long>(p);
}

// Skip PNM whitespace and '#' comments.
inline void pnm_skip(std::istream& s) {
    for (;;) {
        int c = s.peek();
        if (c == '#') {
            while (c != '\n' && c != EOF) c = s.get();
        } else if (std::isspace(c)) {
            s.get();
        } else {
            return;
        }
    }
}

inline int pnm_int(std::istream& s, const std::string& path, const char* what) {
    pnm_skip(s);
    long off = offset_of(s);
    int v;
    if (!(s >> v) || v < 0)
        throw MalformedFile(path + ": bad " + what, off);
    return v;
}

}  // namespace detail

// ---- PPM (P6) / PGM (P5) ---------------------------------------------------

inline RasterRGB read_ppm(const std::string& path) {
    auto f = detail::open_in(path, true);
    char m0 = 0, m1 = 0;
    f.get(m0); f.get(m1);
    if (m0 != 'P' || m1 != '6')
        throw MalformedFile(path + ": not a P6 PPM", 0);
    int w = detail::pnm_int(f, path, "width");
    int h = detail::pnm_int(f, path, "height");
    int maxval = detail::pnm_int(f, path, "maxval");
    if (w < 1 || h < 1) throw MalformedFile(path + ": nonpositive dimensions", detail::offset_of(f));
    if (maxval != 255) throw MalformedFile(path + ": maxval must be 255", detail::offset_of(f));
    f.get();  // single whitespace after maxval
    RasterRGB r(w, h);
    long data_off = detail::offset_of(f);
    f.read(reinterpret_cast<char*>(r.samples.data()),
           static_cast<std::streamsize>(r.samples.size()));
    if (f.gcount() != static_cast<std::streamsize>(r.samples.size()))
        throw MalformedFile(path + ": truncated pixel data", data_off + f.gcount());
    return r;
}

inline void write_ppm(const std::string& path, const RasterRGB& r) {
    auto f = detail::open_out(path, true);
    f << "P6\n" << r.width << " " << r.height << "\n255\n";
    f.write(reinterpret_cast<const char*>(r.samples.data()),
            static_cast<std::streamsize>(r.samples.size()));
    if (!f) throw IoFailure("write failed: " + path);
}

inline Mask read_pgm(const std::string& path) {
    auto f = detail::open_in(path, true);
    char m0 = 0, m1 = 0;
    f.get(m0); f.get(m1);
    if (m0 != 'P' || m1 != '5')
        throw MalformedFile(path + ": not a P5 PGM", 0);
    int w = detail::pnm_int(f, path, "width");
    int h = detail::pnm_int(f, path, "height");
    int maxval = detail::pnm_int(f, path, "maxval");
    if (w < 1 || h < 1) throw MalformedFile(path + ": nonpositive dimensions", detail::offset_of(f));
    if (maxval != 255) throw MalformedFile(path + ": maxval must be 255", detail::offset_of(f));
    f.get();
    Mask m(w, h);
    long data_off = detail::offset_of(f);
    f.read(reinterpret_cast<char*>(m.samples.data()),
           static_cast<std::streamsize>(m.samples.size()));
    if (f.gcount() != static_cast<std::streamsize>(m.samples.size()))
        throw MalformedFile(path + ": truncated pixel data", data_off + f.gcount());
    return m;
}

inline void write_pgm(const std::string& path, const Mask& m) {
    auto f = detail::open_out(path, true);
    f << "P5\n" << m.width << " " << m.height << "\n255\n";
    f.write(reinterpret_cast<const char*>(m.samples.data()),
            static_cast<std::streamsize>(m.samples.size()));
    if (!f) throw IoFailure("write failed: " + path);
}

// ---- ESRI ASCII grid -------------------------------------------------------

inline RasterF32 read_asc(const std::string& path) {
    auto f = detail::open_in(path, false);
    int ncols = -1, nrows = -1;
    double cellsize = 1.0, xll = 0.0, yll = 0.0, nodata = -9999.0;
    // Header: keyword/value lines until the first numeric token.
    for (;;) {
        detail::pnm_skip(f);
        long off = detail::offset_of(f);
        int c = f.peek();
        if (c == EOF) throw MalformedFile(path + ": missing grid data", off);
        if (std::isdigit(c) || c == '-' || c == '+' || c == '.') break;
        std::string key;
        f >> key;
        for (auto& ch : key) ch = static_cast<char>(std::tolower(ch));
        double val;
        if (!(f >> val))
            throw MalformedFile(path + ": bad value for header key '" + key + "'", off);
        if (key == "ncols") ncols = static_cast<int>(val);
        else if (key == "nrows") nrows = static_cast<int>(val);
        else if (key == "xllcorner") xll = val;
        else if (key == "yllcorner") yll = val;
        else if (key == "cellsize") cellsize = val;
        else if (key == "nodata_value") nodata = val;
        else throw MalformedFile(path + ": unknown header key '" + key + "'", off);
    }
    if (ncols < 1 || nrows < 1)
        throw MalformedFile(path + ": ncols/nrows missing or nonpositive", detail::offset_of(f));
    (void)cellsize; (void)xll; (void)yll;
    RasterF32 r(ncols, nrows);
    r.nodata = static_cast<float>(nodata);
    for (size_t i = 0; i < r.samples.size(); ++i) {
        long off = detail::offset_of(f);
        double v;
        if (!(f >> v))
            throw MalformedFile(path + ": truncated grid data", off);
        r.samples[i] = static_cast<float>(v);
    }
    return r;
}

inline void write_asc(const std::string& path, const RasterF32& r,
                      double xll = 0.0, double yll = 0.0, double cellsize = 1.0) {
    auto f = detail::open_out(path, false);
    char buf[64];
    f << "ncols " << r.width << "\n";
    f << "nrows " << r.height << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", xll);      f << "xllcorner " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", yll);      f << "yllcorner " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", cellsize); f << "cellsize " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.4f", static_cast<double>(r.nodata));
    f << "NODATA_value " << buf << "\n";
    for (int row = 0; row < r.height; ++row) {
        for (int col = 0; col < r.width; ++col) {
            std::snprintf(buf, sizeof(buf), "%.4f", static_cast<double>(r.at(col, row)));
            f << buf << (col + 1 == r.width ? "\n" : " ");
        }
    }
    if (!f) throw IoFailure("write failed: " + path);
}

// ---- world file ------------------------------------------------------------

inline GeoTransform read_worldfile(const std::string& path) {
    auto f = detail::open_in(path, false);
    double v[6];
    for (int i = 0; i < 6; ++i) {
        long off = detail::offset_of(f);
        if (!(f >> v[i]))
            throw MalformedFile(path + ": expected 6 numeric lines", off);
    }
    GeoTransform g;
    g.pixel_size_x = v[0];
    g.rot_x = v[1];
    g.rot_y = v[2];
    g.pixel_size_y = v[3];
    g.origin_x = v[4];
    g.origin_y = v[5];
    if (std::fabs(g.det()) < 1e-300)
        throw MalformedFile(path + ": singular georeference", 0);
    return g;
}

inline void write_worldfile(const std::string& path, const GeoTransform& g) {
    auto f = detail::open_out(path, false);
    char buf[64];
    const double v[6] = {g.pixel_size_x, g.rot_x, g.rot_y,
                         g.pixel_size_y, g.origin_x, g.origin_y};
    for (double x : v) {
        std::snprintf(buf, sizeof(buf), "%.10f", x);
        f << buf << "\n";
    }
    if (!f) throw IoFailure("write failed: " + path);
}

// ---- WKT LINESTRING roads --------------------------------------------------

struct RoadNetwork {
    std::vector<std::vector<Vec2>> polylines;  // world coordinates
};

inline RoadNetwork read_wkt_roads(const std::string& path) {
    auto f = detail::open_in(path, false);
    RoadNetwork net;
    std::string line;
    long line_start = 0;
    while (std::getline(f, line)) {
        long off = line_start;
        line_start += static_cast<long>(line.size()) + 1;
        // skip blank lines
        bool blank = true;
        for (char c : line) if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
        if (blank) continue;
        auto open = line.find('(');
        auto close = line.rfind(')');
        if (line.find("LINESTRING") == std::string::npos ||
            open == std::string::npos || close == std::string::npos || close < open)
            throw MalformedFile(path + ": expected 'LINESTRING (x y, ...)'", off);
        std::string body = line.substr(open + 1, close - open - 1);
        std::vector<Vec2> pts;
        std::stringstream ss(body);
        std::string pair;
        while (std::getline(ss, pair, ',')) {
            std::stringstream ps(pair);
            double x, y;
            if (!(ps >> x >> y))
                throw MalformedFile(path + ": bad coordinate pair '" + pair + "'", off);
            pts.push_back({x, y});
        }
        if (pts.size() < 2)
            throw MalformedFile(path + ": LINESTRING needs at least 2 vertices", off);
        for (size_t i = 1; i < pts.size(); ++i)
            if (pts[i].x == pts[i - 1].x && pts[i].y == pts[i - 1].y)
                throw MalformedFile(path + ": repeated consecutive vertex", off);
        net.polylines.push_back(std::move(pts));
    }
    return net;
}

}  // namespace lod2
