#include <istream>
#include <ostream>
#include <string>

#include "strokeid/errors.hpp"
#include "strokeid/net.hpp"
#include "strokeid/text.hpp"

namespace strokeid {

namespace {

constexpr const char* kMagic = "strokeid_checkpoint";
constexpr int kVersion = 1;

void write_vector(std::ostream& out, const char* tag, const Vector& v) {
  out << tag << ' ' << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << format_double(v[i]);
  out << '\n';
}

void write_matrix(std::ostream& out, const char* tag, const Matrix& m) {
  out << tag << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

struct Reader {
  std::istream& in;

  std::string token() {
    std::string t;
    if (!(in >> t)) throw CheckpointError("unexpected end of checkpoint (truncated file?)");
    return t;
  }

  void expect(const std::string& want) {
    const std::string got = token();
    if (got != want)
      throw CheckpointError("malformed checkpoint: expected '" + want + "', got '" + got + "'");
  }

  long integer() {
    long v = 0;
    if (!(in >> v)) throw CheckpointError("unexpected end of checkpoint (truncated file?)");
    return v;
  }

  double real() {
    double v = 0.0;
    if (!(in >> v)) throw CheckpointError("unexpected end of checkpoint (truncated file?)");
    return v;
  }

  Vector vector(const char* tag, Eigen::Index expected_size) {
    expect(tag);
    const long n = integer();
    if (n != expected_size)
      throw CheckpointError(std::string("checkpoint field '") + tag + "' has size " +
                            std::to_string(n) + ", expected " + std::to_string(expected_size));
    Vector v(n);
    for (long i = 0; i < n; ++i) v[i] = real();
    return v;
  }

  Matrix matrix(const char* tag, Eigen::Index rows, Eigen::Index cols) {
    expect(tag);
    const long r = integer(), c = integer();
    if (r != rows || c != cols)
      throw CheckpointError(std::string("checkpoint field '") + tag + "' is " +
                            std::to_string(r) + "x" + std::to_string(c) + ", expected " +
                            std::to_string(rows) + "x" + std::to_string(cols));
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = real();
    return m;
  }
};

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  const MlpModel& m = ckpt.model;
  out << kMagic << ' ' << kVersion << '\n';

  out << "attributes " << ckpt.framing.attributes.size();
  for (Attribute a : ckpt.framing.attributes) out << ' ' << attribute_name(a);
  out << '\n';
  out << "window " << ckpt.framing.window_size << '\n';
  out << "stride " << ckpt.framing.stride << '\n';

  out << "users " << ckpt.user_ids.size();
  for (std::int64_t id : ckpt.user_ids) out << ' ' << id;
  out << '\n';

  out << "norm " << ckpt.stats.mean.size() << '\n';
  for (std::size_t i = 0; i < ckpt.stats.mean.size(); ++i)
    out << format_double(ckpt.stats.mean[i]) << ' ' << format_double(ckpt.stats.stddev[i])
        << '\n';

  out << "model " << m.input_dim << ' ' << m.hidden_dims[0] << ' ' << m.hidden_dims[1] << ' '
      << m.hidden_dims[2] << ' ' << m.output_dim << ' ' << format_double(m.dropout_rate) << ' '
      << format_double(m.bn_epsilon) << ' ' << format_double(m.bn_momentum) << '\n';

  for (int layer = 0; layer < m.num_layers(); ++layer) {
    write_matrix(out, "W", m.weights[static_cast<std::size_t>(layer)]);
    write_vector(out, "b", m.biases[static_cast<std::size_t>(layer)]);
  }
  write_vector(out, "bn_gamma", m.bn_gamma);
  write_vector(out, "bn_beta", m.bn_beta);
  write_vector(out, "bn_running_mean", m.bn_running_mean);
  write_vector(out, "bn_running_var", m.bn_running_var);
  out << "end\n";
  if (!out) throw IoError("failed to write checkpoint stream");
}

Checkpoint load_checkpoint(std::istream& in) {
  Reader r{in};
  r.expect(kMagic);
  const long version = r.integer();
  if (version != kVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ckpt;

  r.expect("attributes");
  const long n_attrs = r.integer();
  if (n_attrs < 1) throw CheckpointError("checkpoint has an empty attribute list");
  ckpt.framing.attributes.clear();
  for (long i = 0; i < n_attrs; ++i) {
    const std::string name = r.token();
    const auto attr = attribute_from_name(name);
    if (!attr) throw CheckpointError("unknown attribute '" + name + "' in checkpoint");
    ckpt.framing.attributes.push_back(*attr);
  }
  r.expect("window");
  ckpt.framing.window_size = static_cast<int>(r.integer());
  r.expect("stride");
  ckpt.framing.stride = static_cast<int>(r.integer());
  ckpt.framing.validate();

  r.expect("users");
  const long n_users = r.integer();
  if (n_users < 1) throw CheckpointError("checkpoint has no users");
  for (long i = 0; i < n_users; ++i) ckpt.user_ids.push_back(r.integer());

  r.expect("norm");
  const long n_norm = r.integer();
  if (n_norm != n_attrs)
    throw CheckpointError("normalization entries do not match the attribute list");
  for (long i = 0; i < n_norm; ++i) {
    ckpt.stats.mean.push_back(r.real());
    ckpt.stats.stddev.push_back(r.real());
  }

  r.expect("model");
  MlpModel& m = ckpt.model;
  m.input_dim = static_cast<int>(r.integer());
  m.hidden_dims = {static_cast<int>(r.integer()), static_cast<int>(r.integer()),
                   static_cast<int>(r.integer())};
  m.output_dim = static_cast<int>(r.integer());
  m.dropout_rate = r.real();
  m.bn_epsilon = r.real();
  m.bn_momentum = r.real();

  if (m.input_dim != ckpt.framing.input_dim())
    throw CheckpointError("model input dimension " + std::to_string(m.input_dim) +
                          " does not match attributes x window = " +
                          std::to_string(ckpt.framing.input_dim()));
  if (m.output_dim != n_users)
    throw CheckpointError("model output dimension does not match the user roster");

  const int dims[5] = {m.input_dim, m.hidden_dims[0], m.hidden_dims[1], m.hidden_dims[2],
                       m.output_dim};
  for (int layer = 0; layer < 4; ++layer) {
    m.weights.push_back(r.matrix("W", dims[layer + 1], dims[layer]));
    m.biases.push_back(r.vector("b", dims[layer + 1]));
  }
  m.bn_gamma = r.vector("bn_gamma", m.hidden_dims[0]);
  m.bn_beta = r.vector("bn_beta", m.hidden_dims[0]);
  m.bn_running_mean = r.vector("bn_running_mean", m.hidden_dims[0]);
  m.bn_running_var = r.vector("bn_running_var", m.hidden_dims[0]);
  r.expect("end");
  return ckpt;
}

}  // namespace strokeid
