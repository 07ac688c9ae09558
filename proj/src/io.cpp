#include "hsbm/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace hsbm {

using nlohmann::json;

namespace {

json params_json(const ModelParams& p) {
    return json{{"n", p.n}, {"d", p.d}, {"a", p.a}, {"b", p.b}, {"seed", p.seed}};
}

template <class T>
T get_field(const json& j, const char* key) {
    if (!j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad field \"") + key + "\": " + e.what());
    }
}

ModelParams params_from(const json& j) {
    if (!j.is_object()) throw FormatError("parameter record must be an object");
    ModelParams p;
    p.n = get_field<std::uint32_t>(j, "n");
    p.d = get_field<std::uint32_t>(j, "d");
    p.a = get_field<double>(j, "a");
    p.b = get_field<double>(j, "b");
    p.seed = j.contains("seed") ? get_field<std::uint64_t>(j, "seed") : 0;
    return p;
}

json parse(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}

void check_schema(const json& j) {
    if (j.contains("schema") && j.at("schema") != kSchemaVersion) {
        throw FormatError("unsupported schema version " + j.at("schema").dump());
    }
}

SpinAssignment spins_from(const std::vector<int>& raw) {
    std::vector<std::int8_t> s;
    s.reserve(raw.size());
    for (int v : raw) {
        if (v != 1 && v != -1) throw FormatError("spins must be +1 or -1");
        s.push_back(static_cast<std::int8_t>(v));
    }
    return SpinAssignment(std::move(s));
}

Hypergraph graph_from(std::uint32_t n, std::uint32_t d, const std::vector<std::vector<Vertex>>& edges) {
    try {
        return Hypergraph(n, d, edges);
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("invalid hypergraph: ") + e.what());
    }
}

constexpr std::array<char, 4> kMagic{'H', 'S', 'B', '1'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t& pos) {
    if (pos + 4 > bytes.size()) throw FormatError("truncated binary hypergraph");
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + k])) << (8 * k);
    pos += 4;
    return v;
}

}  // namespace

std::string hypergraph_to_json(const Hypergraph& h, const SpinAssignment* spins, const ModelParams* params) {
    json j;
    j["schema"] = kSchemaVersion;
    j["n"] = h.n();
    j["d"] = h.d();
    if (spins != nullptr) {
        if (spins->size() != h.n()) throw std::invalid_argument("spin vector length differs from n");
        std::vector<int> raw(spins->values().begin(), spins->values().end());
        j["spins"] = raw;
    }
    j["edges"] = h.edge_list();
    if (params != nullptr) j["params"] = params_json(*params);
    return j.dump() + "\n";
}

HypergraphFile hypergraph_from_json(std::string_view text) {
    const json j = parse(text);
    if (!j.is_object()) throw FormatError("hypergraph document must be an object");
    check_schema(j);
    const auto n = get_field<std::uint32_t>(j, "n");
    const auto d = get_field<std::uint32_t>(j, "d");
    HypergraphFile out;
    out.graph = graph_from(n, d, get_field<std::vector<std::vector<Vertex>>>(j, "edges"));
    if (j.contains("spins") && !j.at("spins").is_null()) {
        out.spins = spins_from(get_field<std::vector<int>>(j, "spins"));
        if (out.spins->size() != n) throw FormatError("spin vector length differs from n");
    }
    if (j.contains("params") && !j.at("params").is_null()) out.params = params_from(j.at("params"));
    return out;
}

std::string hypergraph_to_binary(const Hypergraph& h, const SpinAssignment* spins) {
    if (spins != nullptr && spins->size() != h.n()) throw std::invalid_argument("spin vector length differs from n");
    std::string out(kMagic.begin(), kMagic.end());
    put_u32(out, h.n());
    put_u32(out, h.d());
    put_u32(out, static_cast<std::uint32_t>(h.num_edges()));
    for (std::uint32_t i = 0; i < h.n(); ++i) out.push_back(spins != nullptr ? static_cast<char>((*spins)[i]) : 0);
    for (EdgeId e = 0; e < h.num_edges(); ++e) {
        for (Vertex v : h.edge(e)) put_u32(out, v);
    }
    return out;
}

HypergraphFile hypergraph_from_binary(std::string_view bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic.data(), 4) != 0) {
        throw FormatError("missing binary hypergraph magic");
    }
    std::size_t pos = 4;
    const std::uint32_t n = get_u32(bytes, pos);
    const std::uint32_t d = get_u32(bytes, pos);
    const std::uint32_t m = get_u32(bytes, pos);
    if (pos + n > bytes.size()) throw FormatError("truncated binary hypergraph");
    std::vector<int> raw(n);
    bool labeled = false;
    bool unlabeled = false;
    for (std::uint32_t i = 0; i < n; ++i) {
        raw[i] = static_cast<std::int8_t>(bytes[pos + i]);
        (raw[i] == 0 ? unlabeled : labeled) = true;
    }
    if (labeled && unlabeled) throw FormatError("binary spins partially missing");
    pos += n;
    if (bytes.size() - pos != std::size_t{m} * d * 4) throw FormatError("binary hypergraph size mismatch");
    std::vector<std::vector<Vertex>> edges(m, std::vector<Vertex>(d));
    for (auto& e : edges) {
        for (auto& v : e) v = get_u32(bytes, pos);
    }
    HypergraphFile out;
    out.graph = graph_from(n, d, edges);
    if (labeled) out.spins = spins_from(raw);
    return out;
}

HypergraphFile hypergraph_from_bytes(std::string_view bytes) {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic.data(), 4) == 0) return hypergraph_from_binary(bytes);
    return hypergraph_from_json(bytes);
}

RunConfig config_from_json(std::string_view text) {
    const json j = parse(text);
    check_schema(j);
    RunConfig c;
    c.params = params_from(j);
    if (j.contains("l") && !j.at("l").is_null()) c.l = get_field<unsigned>(j, "l");
    return c;
}

std::string config_to_json(const RunConfig& config) {
    json j = params_json(config.params);
    if (config.l) j["l"] = *config.l;
    return j.dump() + "\n";
}

std::string saw_to_json(const CountMatrix& b, unsigned l) {
    json triplets = json::array();
    for (const auto& t : b.triplets()) triplets.push_back({t.row, t.col, t.value});
    json j{{"schema", kSchemaVersion}, {"n", b.size()}, {"l", l}, {"triplets", std::move(triplets)}};
    return j.dump() + "\n";
}

CountMatrix saw_from_json(std::string_view text, unsigned* l) {
    const json j = parse(text);
    check_schema(j);
    const auto n = get_field<std::size_t>(j, "n");
    if (l != nullptr) *l = get_field<unsigned>(j, "l");
    std::vector<Triplet<std::int64_t>> upper;
    for (const auto& t : get_field<std::vector<std::array<std::int64_t, 3>>>(j, "triplets")) {
        if (t[0] < 0 || t[1] < t[0] || static_cast<std::size_t>(t[1]) >= n) throw FormatError("bad triplet index");
        upper.push_back({static_cast<std::uint32_t>(t[0]), static_cast<std::uint32_t>(t[1]), t[2]});
    }
    return CountMatrix::from_upper(n, std::move(upper));
}

std::string profiles_to_csv(const std::vector<NeighborhoodProfile>& profiles, unsigned l) {
    std::ostringstream out;
    out << "# schema=" << kSchemaVersion << "\n";
    out << "i";
    for (unsigned t = 0; t <= l; ++t) out << ",S_" << t;
    for (unsigned t = 0; t <= l; ++t) out << ",D_" << t;
    out << ",cycle_count\n";
    for (const auto& p : profiles) {
        out << p.vertex;
        for (unsigned t = 0; t <= l; ++t) out << ',' << p.S[t];
        for (unsigned t = 0; t <= l; ++t) out << ',' << p.D[t];
        out << ',' << p.cycle_count << '\n';
    }
    return out.str();
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw FormatError("write failed for " + path);
}

}  // namespace hsbm
