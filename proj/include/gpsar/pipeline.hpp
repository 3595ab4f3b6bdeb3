#ifndef GPSAR_PIPELINE_HPP
#define GPSAR_PIPELINE_HPP

#include <string>

#include "gpsar/io.hpp"
#include "gpsar/scenario.hpp"

namespace gpsar {

struct RunOptions {
    int workers = 1;
    int pad_factor = 16;
    double er_override = -1.0;     // < 0: use the scenario value
    bool truth_trajectory = false; // bypass the estimator
    bool monostatic = false;
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;
};

/// Simulate one aperture's recording on the aperture's (possibly estimated)
/// antenna tracks.
Recording simulate_aperture(const Scenario& scenario, std::size_t aperture_index,
                            const RunOptions& opts);

/// Range-compress a recording, bounding the stored swath to the scene
/// geometry plus margin.
std::vector<RangeProfile> compress_recording(const Recording& recording, int pad_factor,
                                             double max_delay);

/// A conservative upper bound on the round-trip delays the grid can produce.
double swath_max_delay(const Scenario& scenario);

/// Stage drivers; each writes its artifacts plus a manifest into out_dir and
/// reads prior-stage artifacts from it. Throw std::runtime_error when a
/// required input is missing.
void run_simulate(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts);
void run_estimate(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts);
void run_focus(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts);
void run_profile(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts);
void run_hist(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts);
void run_detect(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts);
void run_psf(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts);
void run_all(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts);

void write_manifest(const Scenario& scenario, const std::string& out_dir,
                    const std::string& stage, const RunOptions& opts);

}  // namespace gpsar

#endif
