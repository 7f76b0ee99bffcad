#include "turnpike/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace turnpike {

std::string format_double(double v) {
    char buf[40];
    // shortest representation that round-trips
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v || (std::isnan(back) && std::isnan(v))) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

std::string json_escape(const std::string& s) {
    std::string r;
    for (char c : s) {
        if (c == '"' || c == '\\') r += '\\';
        r += c;
    }
    return r;
}

}  // namespace

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr, const Grid& g) {
    auto out = open_out(path);
    out << "t,x,value\n";
    for (int k = 0; k <= tr.tg.n_steps; ++k)
        for (int i = 0; i < tr.n_space(); ++i)
            out << format_double(tr.tg.t(k)) << ',' << format_double(g.xi(i + 1)) << ','
                << format_double(tr.snaps(i, k)) << '\n';
}

void write_columns_csv(const std::filesystem::path& path, const std::vector<NamedColumn>& cols) {
    if (cols.empty()) throw std::invalid_argument("write_columns_csv: no columns");
    const std::size_t rows = cols.front().second.size();
    for (const auto& c : cols)
        if (c.second.size() != rows)
            throw std::invalid_argument("write_columns_csv: ragged columns");
    auto out = open_out(path);
    for (std::size_t j = 0; j < cols.size(); ++j) out << cols[j].first << (j + 1 < cols.size() ? ',' : '\n');
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out << format_double(cols[j].second[r]) << (j + 1 < cols.size() ? ',' : '\n');
}

std::string sha256_hex_of_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest init failed");
    char buf[8192];
    while (in.good()) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        char h[3];
        std::snprintf(h, sizeof h, "%02x", digest[i]);
        hex += h;
    }
    return hex;
}

void write_manifest(const std::filesystem::path& dir, const Manifest& m) {
    auto out = open_out(dir / "manifest.json");
    out << "{\n";
    out << "  \"config_sha256\": \"" << m.config_sha256 << "\",\n";
    out << "  \"subcommand\": \"" << json_escape(m.subcommand) << "\",\n";
    out << "  \"started_at\": \"" << m.started_at << "\",\n";
    out << "  \"wall_seconds\": " << format_double(m.wall_seconds) << ",\n";
    out << "  \"version\": \"" << json_escape(m.version) << "\",\n";
    out << "  \"artifact_files\": [";
    for (std::size_t i = 0; i < m.artifact_files.size(); ++i)
        out << (i ? ", " : "") << '"' << json_escape(m.artifact_files[i]) << '"';
    out << "],\n  \"timings\": {";
    for (std::size_t i = 0; i < m.timings.size(); ++i)
        out << (i ? ", " : "") << '"' << json_escape(m.timings[i].first)
            << "\": " << format_double(m.timings[i].second);
    out << "},\n  \"config\": " << m.config_json << "\n}\n";
}

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool log_y)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)),
      log_y_(log_y) {}

void SvgPlot::add_line(const std::vector<double>& x, const std::vector<double>& y,
                       std::string label, std::string color, bool dashed) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    if (color.empty()) color = palette[lines_.size() % 8];
    lines_.push_back(Line{x, y, std::move(label), std::move(color), dashed});
}

void SvgPlot::write(const std::filesystem::path& path) const {
    const double W = 860, H = 560, L = 80, R = 30, T = 46, B = 60;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto yval = [&](double v) { return log_y_ ? std::log10(std::max(v, 1e-300)) : v; };
    for (const auto& ln : lines_)
        for (std::size_t i = 0; i < ln.x.size(); ++i) {
            if (log_y_ && !(ln.y[i] > 0.0)) continue;
            xmin = std::min(xmin, ln.x[i]);
            xmax = std::max(xmax, ln.x[i]);
            ymin = std::min(ymin, yval(ln.y[i]));
            ymax = std::max(ymax, yval(ln.y[i]));
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
    if (xmin == xmax) { xmin -= 1; xmax += 1; }
    if (ymin == ymax) { ymin -= 1; ymax += 1; }
    if (log_y_) ymin = std::max(ymin, ymax - 20.0);  // cap at 20 decades
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (yval(y) - ymin) / (ymax - ymin) * (H - T - B); };

    auto out = open_out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "' viewBox='0 0 " << W << ' ' << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='17'>" << title_
        << "</text>\n";
    out << "<line x1='" << L << "' y1='" << H - B << "' x2='" << W - R << "' y2='" << H - B
        << "' stroke='black'/>\n";
    out << "<line x1='" << L << "' y1='" << T << "' x2='" << L << "' y2='" << H - B
        << "' stroke='black'/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + i * (xmax - xmin) / 5;
        out << "<text x='" << px(xv) << "' y='" << H - B + 20
            << "' text-anchor='middle' font-size='12'>" << format_double(xv) << "</text>\n";
        const double yv = ymin + i * (ymax - ymin) / 5;
        out << "<text x='" << L - 8 << "' y='" << H - B - i * (H - T - B) / 5.0 + 4
            << "' text-anchor='end' font-size='12'>"
            << (log_y_ ? "1e" + format_double(yv) : format_double(yv)) << "</text>\n";
    }
    out << "<text x='" << (L + W - R) / 2 << "' y='" << H - 16
        << "' text-anchor='middle' font-size='14'>" << xlabel_ << "</text>\n";
    out << "<text x='20' y='" << (T + H - B) / 2
        << "' text-anchor='middle' font-size='14' transform='rotate(-90 20 " << (T + H - B) / 2
        << ")'>" << ylabel_ << "</text>\n";
    for (const auto& ln : lines_) {
        out << "<polyline fill='none' stroke='" << ln.color << "' stroke-width='1.6'";
        if (ln.dashed) out << " stroke-dasharray='7,5'";
        out << " points='";
        for (std::size_t i = 0; i < ln.x.size(); ++i) {
            if (log_y_ && !(ln.y[i] > 0.0)) continue;
            out << px(ln.x[i]) << ',' << py(ln.y[i]) << ' ';
        }
        out << "'/>\n";
    }
    double ly = T + 12;
    for (const auto& ln : lines_) {
        out << "<line x1='" << W - R - 170 << "' y1='" << ly << "' x2='" << W - R - 140
            << "' y2='" << ly << "' stroke='" << ln.color << "' stroke-width='2'"
            << (ln.dashed ? " stroke-dasharray='7,5'" : "") << "/>\n";
        out << "<text x='" << W - R - 132 << "' y='" << ly + 4 << "' font-size='12'>" << ln.label
            << "</text>\n";
        ly += 18;
    }
    out << "</svg>\n";
}

}  // namespace turnpike
