#ifndef MESO_REPORT_HPP
#define MESO_REPORT_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace meso {

// one row of an error sweep
struct SweepRow {
  double param = 0.0;
  double l2_rel = 0.0;
  double h1_rel = 0.0;
  double seconds = 0.0;
};

struct ErrorReport {
  std::vector<SweepRow> rows;
  std::optional<double> l2_slope;
  std::optional<double> h1_slope;
  std::vector<std::string> notes;  // config echo, written as trailing comments

  void finalize_slopes();  // fills the slopes when >= 3 rows exist
  // header `param,l2_rel,h1_rel,seconds`, then rows, then `# slope=` comments
  void write_csv(std::ostream& os) const;
};

// least-squares slope of log(error) vs log(param); rejects non-positive data
double fit_slope(const std::vector<std::pair<double, double>>& points);

std::string format_g12(double v);  // 12 significant digits

void write_file(const std::string& path, const std::string& contents);

}  // namespace meso

#endif
