#ifndef HSBM_IO_HPP
#define HSBM_IO_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hsbm/hypergraph.hpp"
#include "hsbm/localstats.hpp"
#include "hsbm/model.hpp"
#include "hsbm/sparse.hpp"

namespace hsbm {

// Raised for unreadable files and malformed documents.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

struct HypergraphFile {
    Hypergraph graph;
    std::optional<SpinAssignment> spins;
    std::optional<ModelParams> params;
};

// {"schema":1,"n":..,"d":..,"spins":[..],"edges":[[..],..],"params":{..}};
// spins and params are optional.
std::string hypergraph_to_json(const Hypergraph& h, const SpinAssignment* spins = nullptr,
                               const ModelParams* params = nullptr);
HypergraphFile hypergraph_from_json(std::string_view text);

// "HSB1", u32 n, u32 d, u32 m, n spin bytes (0 when unlabeled), m*d u32
// vertex ids; all little-endian.
std::string hypergraph_to_binary(const Hypergraph& h, const SpinAssignment* spins = nullptr);
HypergraphFile hypergraph_from_binary(std::string_view bytes);

// Dispatches on the leading magic bytes.
HypergraphFile hypergraph_from_bytes(std::string_view bytes);

struct RunConfig {
    ModelParams params;
    std::optional<unsigned> l;
};

// {"n":..,"d":..,"a":..,"b":..,"seed":..,"l":..}; "l" optional.
RunConfig config_from_json(std::string_view text);
std::string config_to_json(const RunConfig& config);

// {"schema":1,"n":..,"l":..,"triplets":[[i,j,count],..]} with i <= j.
std::string saw_to_json(const CountMatrix& b, unsigned l);
CountMatrix saw_from_json(std::string_view text, unsigned* l = nullptr);

// One row per vertex: i, S_0..S_l, D_0..D_l, cycle_count.
std::string profiles_to_csv(const std::vector<NeighborhoodProfile>& profiles, unsigned l);

// Shortest round-trip decimal form; "nan" and "inf" spelled out.
std::string format_double(double x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace hsbm

#endif  // HSBM_IO_HPP
