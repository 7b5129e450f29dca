#include "gs4d/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gs4d/error.hpp"

namespace gs4d {

using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorKind::io, "write failed for " + path.string());
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::validation, std::string("malformed JSON: ") + e.what());
    }
}

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string constellation_to_json(const LabeledConstellation& c, const Metadata& metadata) {
    std::ostringstream os;
    os << "{\n  \"m\": " << c.bits() << ",\n  \"points\": [\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto& p = c.point(i);
        os << "    [" << g17(p[0]) << ", " << g17(p[1]) << ", " << g17(p[2]) << ", " << g17(p[3]) << "]"
           << (i + 1 < c.size() ? ",\n" : "\n");
    }
    os << "  ],\n  \"labels\": [";
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? ", " : "") << c.label(i);
    os << "],\n  \"metadata\": " << json(metadata).dump() << "\n}\n";
    return os.str();
}

void write_constellation(const std::filesystem::path& path, const LabeledConstellation& c, const Metadata& metadata) {
    spill(path, constellation_to_json(c, metadata));
}

ConstellationFile constellation_from_json(const std::string& text) {
    const json j = parse(text);
    try {
        if (!j.is_object()) fail(ErrorKind::validation, "constellation file must be a JSON object");
        const int m = j.at("m").get<int>();
        std::vector<Point4> pts;
        for (const auto& row : j.at("points")) {
            if (!row.is_array() || row.size() != 4) fail(ErrorKind::validation, "each point must have 4 coordinates");
            pts.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(), row[3].get<double>()});
        }
        if (m < 1 || m > 30 || pts.size() != (std::size_t{1} << m))
            fail(ErrorKind::validation, "m = " + std::to_string(m) + " is inconsistent with " +
                                            std::to_string(pts.size()) + " points");
        auto labels = j.at("labels").get<std::vector<Label>>();
        Metadata meta;
        if (j.contains("metadata") && j["metadata"].is_object())
            for (const auto& [k, v] : j["metadata"].items()) meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
        return {LabeledConstellation(std::move(pts), std::move(labels)), std::move(meta)};
    } catch (const json::exception& e) {
        fail(ErrorKind::validation, std::string("malformed constellation file: ") + e.what());
    }
}

ConstellationFile read_constellation(const std::filesystem::path& path) { return constellation_from_json(slurp(path)); }

LinkSpec link_from_json(const std::string& text) {
    const json j = parse(text);
    LinkSpec link;
    try {
        if (!j.is_object()) fail(ErrorKind::validation, "link config must be a JSON object");
        auto take = [&](const char* key, auto& slot) {
            if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
        };
        take("span_length_km", link.span_length_km);
        take("n_spans", link.n_spans);
        take("alpha_db_per_km", link.alpha_db_per_km);
        take("noise_figure_db", link.noise_figure_db);
        take("symbol_rate_gbaud", link.symbol_rate_gbaud);
        take("carrier_wavelength_nm", link.carrier_wavelength_nm);
        take("coherence_factor", link.coherence_factor);
        take("dispersion_ps_nm_km", link.dispersion_ps_nm_km);
        take("gamma_per_w_km", link.gamma_per_w_km);
        if (j.contains("eta")) {
            const auto& e = j.at("eta");
            if (!e.is_array() || e.size() != 4) fail(ErrorKind::validation, "eta must hold four coefficients");
            for (std::size_t i = 0; i < 4; ++i) link.eta[i] = e[i].get<double>();
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::validation, std::string("malformed link config: ") + e.what());
    }
    link.validate();
    return link;
}

LinkSpec read_link(const std::filesystem::path& path) { return link_from_json(slurp(path)); }

std::string link_to_json(const LinkSpec& link) {
    json j = {{"span_length_km", link.span_length_km},
              {"n_spans", link.n_spans},
              {"alpha_db_per_km", link.alpha_db_per_km},
              {"noise_figure_db", link.noise_figure_db},
              {"symbol_rate_gbaud", link.symbol_rate_gbaud},
              {"carrier_wavelength_nm", link.carrier_wavelength_nm},
              {"eta", link.eta},
              {"coherence_factor", link.coherence_factor},
              {"dispersion_ps_nm_km", link.dispersion_ps_nm_km},
              {"gamma_per_w_km", link.gamma_per_w_km}};
    return j.dump(2) + "\n";
}

}  // namespace gs4d
