#include "symreg/report_io.hpp"

#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace symreg {

namespace {

using json = nlohmann::json;

json binary_json(const BinarySideMetrics& m) {
    json j;
    j["accuracy"] = m.accuracy;
    j["sensitivity"] = m.sensitivity ? json(*m.sensitivity) : json(nullptr);
    j["specificity"] = m.specificity ? json(*m.specificity) : json(nullptr);
    return j;
}

json curve_summary_json(const CurveResult& c) {
    json j;
    j["auc"] = c.auc;
    j["truncated"] = c.truncated;
    j["k_at_95cp"] = c.k_at_95cp ? json(*c.k_at_95cp) : json(nullptr);
    j["sharpness_at_95cp"] = c.sharpness_at_95cp ? json(*c.sharpness_at_95cp) : json(nullptr);
    return j;
}

json side_json(const SideErrors& s) {
    return json{{"rmse", s.rmse}, {"mae", s.mae}, {"pearson_r", s.pearson}};
}

}  // namespace

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string train_report_csv(const TrainReport& report) {
    std::ostringstream os;
    os << "epoch,train_reg,train_sym,train_final,val_reg,val_sym,val_final,val_mae\n";
    for (const auto& r : report.epochs) {
        os << r.epoch << ',' << format_double(r.train_reg) << ',' << format_double(r.train_sym)
           << ',' << format_double(r.train_final) << ',' << format_double(r.val_reg) << ','
           << format_double(r.val_sym) << ',' << format_double(r.val_final) << ','
           << format_double(r.val_mae) << '\n';
    }
    return os.str();
}

std::string sweep_csv(const std::string& param_name, const SweepResult& result) {
    std::ostringstream os;
    os << "param,value,val_mae\n";
    for (const auto& r : result.rows)
        os << param_name << ',' << format_double(r.value) << ',' << format_double(r.val_mae)
           << '\n';
    return os.str();
}

std::string intervals_csv(const Dataset& ds, const std::vector<std::size_t>& case_indices,
                          const std::vector<IntervalResult>& intervals) {
    std::ostringstream os;
    os << "case_id,y_r,y_l,yhat_r,yhat_l,sigma_r,sigma_l,sigma_sym,sigma_r_sym,sigma_l_sym\n";
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& s = ds.samples[case_indices[i]];
        const auto& iv = intervals[i];
        os << case_indices[i] << ',' << format_double(s.y_r) << ',' << format_double(s.y_l) << ','
           << format_double(iv.y_r_hat) << ',' << format_double(iv.y_l_hat) << ','
           << format_double(iv.sigma_r) << ',' << format_double(iv.sigma_l) << ','
           << format_double(iv.sigma_sym) << ',' << format_double(iv.sigma_r_sym) << ','
           << format_double(iv.sigma_l_sym) << '\n';
    }
    return os.str();
}

std::string curve_csv(const CurveResult& curve) {
    std::ostringstream os;
    os << "k,cp,sharpness\n";
    for (const auto& p : curve.points)
        os << format_double(p.k) << ',' << format_double(p.cp) << ','
           << format_double(p.sharpness) << '\n';
    return os.str();
}

std::string table3_csv(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::ostringstream os;
    os << "method,rmse_right,rmse_left,rmse_avg,mae_right,mae_left,mae_avg,r_right,r_left,r_avg\n";
    for (const auto& [name, rep] : rows) {
        os << name << ',' << format_double(rep.right.rmse) << ',' << format_double(rep.left.rmse)
           << ',' << format_double(rep.avg.rmse) << ',' << format_double(rep.right.mae) << ','
           << format_double(rep.left.mae) << ',' << format_double(rep.avg.mae) << ','
           << format_double(rep.right.pearson) << ',' << format_double(rep.left.pearson) << ','
           << format_double(rep.avg.pearson) << '\n';
    }
    return os.str();
}

std::string table5_csv(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::ostringstream os;
    os << "method,auc_right,auc_left,auc_avg,sharpness95_right,sharpness95_left,sharpness95_avg\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& [name, rep] : rows) {
        os << name << ',' << format_double(rep.curve_right.auc) << ','
           << format_double(rep.curve_left.auc) << ',' << format_double(rep.auc_avg) << ','
           << opt(rep.curve_right.sharpness_at_95cp) << ','
           << opt(rep.curve_left.sharpness_at_95cp) << ',' << opt(rep.sharpness95_avg) << '\n';
    }
    return os.str();
}

std::string metrics_report_json(const MetricsReport& report) {
    json j;
    j["right"] = side_json(report.right);
    j["left"] = side_json(report.left);
    j["avg"] = side_json(report.avg);
    j["binary"] = {{"right", binary_json(report.bin_right)}, {"left", binary_json(report.bin_left)}};
    j["uncertainty"] = {{"right", curve_summary_json(report.curve_right)},
                        {"left", curve_summary_json(report.curve_left)},
                        {"auc_avg", report.auc_avg},
                        {"sharpness95_avg", report.sharpness95_avg
                                                ? json(*report.sharpness95_avg)
                                                : json(nullptr)}};
    return j.dump(2) + "\n";
}

}  // namespace symreg
