#ifndef GPSAR_DETECTION_HPP
#define GPSAR_DETECTION_HPP

#include <string>
#include <vector>

#include "gpsar/imaging.hpp"

namespace gpsar {

/// 2D CA-CFAR window: guard and training cells per side, design false-alarm
/// probability. The threshold factor alpha = Nt * (pfa^(-1/Nt) - 1) is
/// recomputed per cell where the training ring is truncated at the borders.
struct CfarParams {
    int guard = 4;
    int train = 8;
    double pfa = 1e-4;

    double threshold_factor(int n_train) const;
    void validate() const;
};

struct Detection {
    double x = 0.0, y = 0.0;  // m
    double z = 0.0;           // m, focus plane
    double amplitude_db = 0.0;  // relative to volume maximum
    int plane_index = 0;
    int i = 0, j = 0;
    int group_id = -1;
};

/// CA-CFAR on a magnitude-squared plane. Throws if the plane is smaller than
/// the full window.
std::vector<std::uint8_t> ca_cfar_plane(const std::vector<double>& power, int nx, int ny,
                                        const CfarParams& params);

/// Per-plane CFAR over the volume; detections carry their focus-plane z.
std::vector<Detection> detect_volume(const ImageVolume& volume, const CfarParams& params);

struct TargetReport {
    double x = 0.0, y = 0.0, z = 0.0;  // max-amplitude member
    double amplitude_db = 0.0;
    int member_count = 0;
};

/// Connected-component grouping by 3D Euclidean proximity <= radius.
/// Also writes group ids back into the detections.
std::vector<TargetReport> group_detections(std::vector<Detection>& detections, double radius);

struct ScoreReport {
    int detected = 0;
    int missed = 0;
    int false_alarms = 0;
    std::vector<int> matched_truth;  // indices of detected truth targets
};

/// Match grouped reports against ground truth positions in the xy-plane
/// within match_radius.
ScoreReport score_detections(const std::vector<TargetReport>& reports,
                             const std::vector<Eigen::Vector3d>& truth,
                             double match_radius = 0.25);

void write_detections_csv(const std::string& path, const std::vector<Detection>& detections);

}  // namespace gpsar

#endif
