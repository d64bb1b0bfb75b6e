#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace cipherlab {

// One row of the per-step training log.
struct MetricsRow {
    std::int64_t step = 0;
    double lr = 0;
    double d_loss_x = 0, d_loss_y = 0;
    double g_loss_f = 0, g_loss_g = 0;
    double cyc_loss = 0;
    double gp_x = 0, gp_y = 0;
    double acc_f = 0, acc_g = 0;
    double seconds = 0;
};

extern const char* kMetricsHeader;

class MetricsWriter {
public:
    explicit MetricsWriter(const std::string& path);
    void append(const MetricsRow& row);

private:
    std::ofstream out_;
    std::string path_;
};

std::vector<MetricsRow> read_metrics(const std::string& path);

} // namespace cipherlab
