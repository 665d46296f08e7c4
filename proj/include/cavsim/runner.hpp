// runner.hpp — Experiment orchestration: dispatch a RunSpec to the solvers,
// fan sweeps out over a worker pool, and emit deterministic CSV.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cavsim/run_spec.hpp"
#include "cavsim/rwa.hpp"
#include "cavsim/spectral.hpp"

namespace cavsim::cli {

struct Payload {
    enum class Kind { Series, Pair, Map };
    Kind kind = Kind::Series;
    std::string label;  // empty for single-run bundles

    rwa::TimeSeries series;            // Series
    rwa::TimeSeries series_b;          // Pair: series = reference, series_b = heom
    RealVector difference;             // Pair
    std::optional<spectral::DiscriminantMap> map;
};

struct ResultBundle {
    RunSpec resolved;
    std::string version;
    std::vector<Payload> payloads;
};

ResultBundle run(const RunSpec& spec);

// Writes one CSV per payload. Single payload lands exactly at `path`;
// sweep payloads insert `_<label>` before the extension. Returns the paths
// written, in payload order.
std::vector<std::string> emit_csv(const ResultBundle& bundle, const std::string& path);

}  // namespace cavsim::cli
