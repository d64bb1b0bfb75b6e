#include "metrics.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace cipherlab {

const char* kMetricsHeader =
    "step,lr,d_loss_x,d_loss_y,g_loss_f,g_loss_g,cyc_loss,gp_x,gp_y,acc_f,acc_g,seconds";

MetricsWriter::MetricsWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_) throw std::runtime_error("cannot write metrics log: " + path);
    out_ << kMetricsHeader << "\n";
}

void MetricsWriter::append(const MetricsRow& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%lld,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.3f",
                  static_cast<long long>(r.step), r.lr, r.d_loss_x, r.d_loss_y, r.g_loss_f,
                  r.g_loss_g, r.cyc_loss, r.gp_x, r.gp_y, r.acc_f, r.acc_g, r.seconds);
    out_ << buf << "\n";
    out_.flush();
    if (!out_) throw std::runtime_error("short write on metrics log: " + path_);
}

std::vector<MetricsRow> read_metrics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metrics log: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("metrics log is empty: " + path);
    if (line != kMetricsHeader)
        throw std::runtime_error("metrics log has an unexpected header: " + path);
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        MetricsRow r;
        long long step = 0;
        const int got = std::sscanf(line.c_str(), "%lld,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf",
                                    &step, &r.lr, &r.d_loss_x, &r.d_loss_y, &r.g_loss_f,
                                    &r.g_loss_g, &r.cyc_loss, &r.gp_x, &r.gp_y, &r.acc_f, &r.acc_g,
                                    &r.seconds);
        if (got != 12) throw std::runtime_error("metrics log has a malformed row: " + path);
        r.step = step;
        rows.push_back(r);
    }
    return rows;
}

} // namespace cipherlab
