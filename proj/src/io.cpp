#include "microlam/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace microlam {

namespace {

unsigned char to_gray(double rho, bool invert) {
  const double v = std::clamp(rho, 0.0, 1.0);
  const double g = invert ? 1.0 - v : v;
  return static_cast<unsigned char>(std::lround(255.0 * g));
}

void write_pgm_raw(const std::filesystem::path& path,
                   const std::vector<unsigned char>& pix, int w, int h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(pix.data()),
            static_cast<std::streamsize>(pix.size()));
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_pgm(const std::filesystem::path& path, const Eigen::VectorXd& rho,
               int nx, int ny, bool invert) {
  std::vector<unsigned char> pix(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      pix[static_cast<std::size_t>(ny - 1 - j) * nx + i] =
          to_gray(rho[j * nx + i], invert);
  write_pgm_raw(path, pix, nx, ny);
}

void write_pgm_tiled(const std::filesystem::path& path,
                     const Eigen::VectorXd& rho, int nx, int ny,
                     bool invert) {
  const int w = 2 * nx, h = 2 * ny;
  std::vector<unsigned char> pix(static_cast<std::size_t>(w) * h);
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i)
      pix[static_cast<std::size_t>(h - 1 - j) * w + i] =
          to_gray(rho[(j % ny) * nx + (i % nx)], invert);
  // outline of the lower-left tile at mid gray
  auto mark = [&](int i, int j) {
    pix[static_cast<std::size_t>(h - 1 - j) * w + i] = 128;
  };
  for (int i = 0; i < nx; ++i) {
    mark(i, 0);
    mark(i, ny - 1);
  }
  for (int j = 0; j < ny; ++j) {
    mark(0, j);
    mark(nx - 1, j);
  }
  write_pgm_raw(path, pix, w, h);
}

void write_field_csv(const std::filesystem::path& path,
                     const Eigen::VectorXd& rho, int nx, int ny) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << nx << ',' << ny << '\n';
  for (int e = 0; e < nx * ny; ++e) out << format_double(rho[e]) << '\n';
}

void write_iteration_log(const std::filesystem::path& path,
                         const std::vector<IterationRecord>& history) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iter,beta,objective,volume,max_design_change\n";
  for (const auto& r : history)
    out << r.iteration << ',' << format_double(r.beta) << ','
        << format_double(r.objective) << ',' << format_double(r.volume) << ','
        << format_double(r.change) << '\n';
}

void write_laminate_json(const std::filesystem::path& path,
                         const Rank3Laminate& lam, const MomentVector& m,
                         double gamma, double f, double bound,
                         const ParallelogramCell& cell) {
  nlohmann::json j;
  j["rank"] = lam.rank;
  j["p"] = lam.p;
  j["theta"] = lam.theta;
  const auto mu = layer_widths(lam, f);
  j["mu"] = mu;
  j["f"] = f;
  j["gamma"] = gamma;
  j["moments"] = {m.m1, m.m2, m.m3, m.m4};
  j["bound"] = bound;
  j["cell"]["a1"] = {cell.a1.x(), cell.a1.y()};
  j["cell"]["a2"] = {cell.a2.x(), cell.a2.y()};
  for (const auto& s : cell.stripes) {
    nlohmann::json js;
    js["theta"] = s.theta;
    js["spacing"] = s.spacing;
    js["width"] = s.width;
    js["waves"] = {s.ku, s.kv};
    j["cell"]["stripes"].push_back(js);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace microlam
