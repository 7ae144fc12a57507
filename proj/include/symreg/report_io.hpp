#pragma once

#include <string>
#include <utility>
#include <vector>

#include "symreg/evaluate.hpp"
#include "symreg/symmetric.hpp"

namespace symreg {

// CSV/JSON emitters. Columns are fixed contracts; numbers are written with
// 17 significant digits so outputs round-trip and runs diff byte-identical.

/// Columns: epoch,train_reg,train_sym,train_final,val_reg,val_sym,val_final,val_mae
std::string train_report_csv(const TrainReport& report);

/// Columns: param,value,val_mae
std::string sweep_csv(const std::string& param_name, const SweepResult& result);

/// Columns: case_id,y_r,y_l,yhat_r,yhat_l,sigma_r,sigma_l,sigma_sym,sigma_r_sym,sigma_l_sym
std::string intervals_csv(const Dataset& ds, const std::vector<std::size_t>& case_indices,
                          const std::vector<IntervalResult>& intervals);

/// Columns: k,cp,sharpness
std::string curve_csv(const CurveResult& curve);

/// Columns: method,rmse_right,rmse_left,rmse_avg,mae_right,mae_left,mae_avg,r_right,r_left,r_avg
std::string table3_csv(const std::vector<std::pair<std::string, MetricsReport>>& rows);

/// Columns: method,auc_right,auc_left,auc_avg,sharpness95_right,sharpness95_left,sharpness95_avg
/// (absent sharpness values emit empty cells)
std::string table5_csv(const std::vector<std::pair<std::string, MetricsReport>>& rows);

std::string metrics_report_json(const MetricsReport& report);

std::string format_double(double v);

}  // namespace symreg
