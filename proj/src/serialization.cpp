#include "evopref/serialization.hpp"

#include <cstring>
#include <stdexcept>

namespace evopref {

using nlohmann::json;

namespace {
constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const unsigned char* data, std::size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        unsigned int chunk = data[i] << 16;
        if (i + 1 < len)
            chunk |= data[i + 1] << 8;
        if (i + 2 < len)
            chunk |= data[i + 2];
        out += kB64Alphabet[(chunk >> 18) & 0x3f];
        out += kB64Alphabet[(chunk >> 12) & 0x3f];
        out += i + 1 < len ? kB64Alphabet[(chunk >> 6) & 0x3f] : '=';
        out += i + 2 < len ? kB64Alphabet[chunk & 0x3f] : '=';
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    int lookup[256];
    std::memset(lookup, -1, sizeof(lookup));
    for (int i = 0; i < 64; ++i)
        lookup[static_cast<unsigned char>(kB64Alphabet[i])] = i;

    std::vector<unsigned char> out;
    out.reserve(text.size() / 4 * 3);
    unsigned int chunk = 0;
    int bits = 0;
    for (char ch : text) {
        if (ch == '=' || ch == '\n' || ch == '\r')
            continue;
        const int v = lookup[static_cast<unsigned char>(ch)];
        if (v < 0)
            throw std::invalid_argument("invalid base64 character");
        chunk = (chunk << 6) | static_cast<unsigned int>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((chunk >> bits) & 0xff));
        }
    }
    return out;
}

namespace {

json matrix_rows_to_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    if (j.is_string()) {
        // base64 little-endian doubles, row-major
        const auto bytes = base64_decode(j.get<std::string>());
        if (bytes.size() != static_cast<std::size_t>(rows) * cols * sizeof(double))
            throw std::invalid_argument("base64 matrix payload has wrong size");
        const double* vals = reinterpret_cast<const double*>(bytes.data());
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                m(r, c) = vals[r * cols + c];
        return m;
    }
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw std::invalid_argument("matrix payload has wrong row count");
    for (int r = 0; r < rows; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw std::invalid_argument("matrix payload has wrong column count");
        for (int c = 0; c < cols; ++c)
            m(r, c) = row[c].get<double>();
    }
    return m;
}

}  // namespace

json genome_to_json(const LowRankGenome& g) {
    json shape = json::array();
    for (const auto& s : g.shape())
        shape.push_back({{"d", s.d}, {"k_cols", s.k_cols}, {"r", s.r}});
    json layers = json::array();
    for (std::size_t i = 0; i < g.num_layers(); ++i)
        layers.push_back({{"B", matrix_rows_to_json(g.layer_b(i))},
                          {"A", matrix_rows_to_json(g.layer_a(i))}});
    return {{"shape", std::move(shape)},
            {"alpha", g.alpha()},
            {"id", g.id()},
            {"layers", std::move(layers)}};
}

LowRankGenome genome_from_json(const json& j) {
    std::vector<LayerShape> shape;
    for (const auto& s : j.at("shape"))
        shape.push_back(LayerShape{s.at("d").get<int>(), s.at("k_cols").get<int>(),
                                   s.at("r").get<int>()});
    const double alpha = j.at("alpha").get<double>();
    const std::uint64_t id = j.value("id", std::uint64_t{0});

    int total = 0;
    for (const auto& s : shape)
        total += s.param_count();
    Eigen::VectorXd params(total);
    const auto& layers = j.at("layers");
    if (layers.size() != shape.size())
        throw std::invalid_argument("genome layer count differs from shape");
    int offset = 0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        const auto b = matrix_from_json(layers[i].at("B"), shape[i].d, shape[i].r);
        const auto a =
            matrix_from_json(layers[i].at("A"), shape[i].r, shape[i].k_cols);
        Eigen::Map<Eigen::MatrixXd>(params.data() + offset, shape[i].d,
                                    shape[i].r) = b;
        offset += shape[i].d * shape[i].r;
        Eigen::Map<Eigen::MatrixXd>(params.data() + offset, shape[i].r,
                                    shape[i].k_cols) = a;
        offset += shape[i].r * shape[i].k_cols;
    }
    return LowRankGenome::from_flat(std::move(shape), std::move(params), alpha, id);
}

json archive_entries_to_json(const std::vector<ArchiveEntry>& entries,
                             bool inline_genomes) {
    json arr = json::array();
    for (const auto& e : entries) {
        json item = {{"objectives", e.objectives},
                     {"generation", e.generation},
                     {"mode", e.mode}};
        if (inline_genomes)
            item["genome"] = genome_to_json(e.genome);
        else
            item["genome_id"] = e.genome.id();
        arr.push_back(std::move(item));
    }
    return arr;
}

json archive_to_json(const GridArchive& archive, bool inline_genomes) {
    json cells = json::array();
    for (const auto& [key, entry] : archive.cells()) {
        json item = {{"cell", key},
                     {"objectives", entry.objectives},
                     {"generation", entry.generation},
                     {"mode", entry.mode}};
        if (inline_genomes)
            item["genome"] = genome_to_json(entry.genome);
        else
            item["genome_id"] = entry.genome.id();
        cells.push_back(std::move(item));
    }
    return {{"grid", archive.cells_per_axis()},
            {"objectives", archive.objectives()},
            {"occupied", archive.size()},
            {"cells", std::move(cells)}};
}

json landscape_to_json(const PreferenceLandscape& landscape) {
    const auto& cfg = landscape.config();
    json modes = json::array();
    for (const auto& m : landscape.modes()) {
        std::vector<double> center(m.center.data(),
                                   m.center.data() + m.center.size());
        modes.push_back({{"center", center},
                         {"width", m.width},
                         {"scores", m.scores}});
    }
    return {{"seed", cfg.seed},
            {"modes", cfg.modes},
            {"feature_dim", cfg.feature_dim},
            {"genome_dim", cfg.genome_dim},
            {"objectives", cfg.objectives},
            {"width", cfg.width},
            {"noise_scale", cfg.noise_scale},
            {"floor", cfg.floor_value},
            {"capture_factor", cfg.capture_factor},
            {"center_box", cfg.center_box},
            {"feature_gain", cfg.feature_gain},
            {"lse_temperature", cfg.lse_temperature},
            {"mode_table", std::move(modes)}};
}

json generation_row_to_json(const GenerationRow& row) {
    return {{"generation", row.generation},
            {"hypervolume", row.hypervolume},
            {"covered_modes", row.covered_modes},
            {"coverage_fraction", row.coverage_fraction},
            {"sigma", row.sigma},
            {"evaluations_used", row.evaluations_used},
            {"archive_occupied", row.archive_occupied},
            {"collapsed", row.collapsed},
            {"best_weighted", row.best_weighted}};
}

GenerationRow generation_row_from_json(const json& j) {
    GenerationRow row;
    row.generation = j.at("generation").get<int>();
    row.hypervolume = j.at("hypervolume").get<double>();
    row.covered_modes = j.at("covered_modes").get<int>();
    row.coverage_fraction = j.at("coverage_fraction").get<double>();
    row.sigma = j.at("sigma").get<double>();
    row.evaluations_used = j.at("evaluations_used").get<std::int64_t>();
    row.archive_occupied = j.value("archive_occupied", 0);
    row.collapsed = j.value("collapsed", true);
    row.best_weighted = j.value("best_weighted", 0.0);
    return row;
}

json run_record_to_json(const RunRecord& record, bool include_final_set) {
    json rows = json::array();
    for (const auto& row : record.rows)
        rows.push_back(generation_row_to_json(row));
    json j = {{"algorithm", record.algorithm},
              {"config_hash", record.config_hash},
              {"seed", record.seed},
              {"evaluations_used", record.evaluations_used},
              {"wall_clock_ms", record.wall_clock_ms},
              {"final_covered", record.final_covered},
              {"final_coverage_fraction", record.final_coverage_fraction},
              {"final_collapsed", record.final_collapsed},
              {"final_hypervolume", record.final_hypervolume},
              {"rows", std::move(rows)}};
    if (include_final_set)
        j["final_set"] = archive_entries_to_json(record.final_set, true);
    return j;
}

RunRecord run_record_from_json(const json& j) {
    RunRecord record;
    record.algorithm = j.at("algorithm").get<std::string>();
    record.config_hash = j.at("config_hash").get<std::uint64_t>();
    record.seed = j.at("seed").get<int>();
    record.evaluations_used = j.at("evaluations_used").get<std::int64_t>();
    record.wall_clock_ms = j.value("wall_clock_ms", 0.0);
    record.final_covered = j.at("final_covered").get<int>();
    record.final_coverage_fraction = j.at("final_coverage_fraction").get<double>();
    record.final_collapsed = j.at("final_collapsed").get<bool>();
    record.final_hypervolume = j.at("final_hypervolume").get<double>();
    for (const auto& row : j.at("rows"))
        record.rows.push_back(generation_row_from_json(row));
    if (j.contains("final_set")) {
        for (const auto& item : j.at("final_set")) {
            ArchiveEntry e;
            e.objectives = item.at("objectives").get<ObjectiveVector>();
            e.generation = item.at("generation").get<int>();
            e.mode = item.value("mode", -1);
            if (item.contains("genome"))
                e.genome = genome_from_json(item.at("genome"));
            record.final_set.push_back(std::move(e));
        }
    }
    return record;
}

}  // namespace evopref
