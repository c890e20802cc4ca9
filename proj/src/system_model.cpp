#include "strhc/system_model.hpp"

#include <stdexcept>

namespace strhc::model {

void validate(const SystemModel& m) {
  const int n = m.state_dim();
  if (n == 0 || m.A.cols() != n) throw std::invalid_argument("model: A must be square");
  if (m.B.rows() != n || m.B.cols() == 0) throw std::invalid_argument("model: B shape");
  if (m.Bd.rows() != n || m.Bd.cols() == 0) throw std::invalid_argument("model: Bd shape");
  if (m.state_set.dim() != n) throw std::invalid_argument("model: state set dimension");
  if (m.input_set.dim() != m.input_dim())
    throw std::invalid_argument("model: input set dimension");
  if (m.process_noise.dim() != m.process_noise_dim())
    throw std::invalid_argument("model: process noise dimension");
  if (m.measurement_noise.dim() != n)
    throw std::invalid_argument("model: measurement noise dimension");
  if (!m.A.allFinite() || !m.B.allFinite() || !m.Bd.allFinite())
    throw std::invalid_argument("model: non-finite dynamics");
}

SystemModel discretize_forward_euler(const Eigen::MatrixXd& Ac, const Eigen::MatrixXd& Bc,
                                     const Eigen::MatrixXd& Bdc, double Ts,
                                     geom::Polytope state_set, geom::Polytope input_set,
                                     geom::Polytope process_noise,
                                     geom::Polytope measurement_noise) {
  if (!(Ts > 0.0)) throw std::invalid_argument("discretize: sample time must be positive");
  SystemModel m;
  m.A = Eigen::MatrixXd::Identity(Ac.rows(), Ac.cols()) + Ts * Ac;
  m.B = Ts * Bc;
  m.Bd = Ts * Bdc;
  m.state_set = std::move(state_set);
  m.input_set = std::move(input_set);
  m.process_noise = std::move(process_noise);
  m.measurement_noise = std::move(measurement_noise);
  validate(m);
  return m;
}

Eigen::VectorXd step(const SystemModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& dx) {
  if (x.size() != m.state_dim() || u.size() != m.input_dim() ||
      dx.size() != m.process_noise_dim())
    throw std::invalid_argument("step: dimension mismatch");
  return m.A * x + m.B * u + m.Bd * dx;
}

Eigen::VectorXd measure(const SystemModel& m, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& dy) {
  if (x.size() != m.state_dim() || dy.size() != m.state_dim())
    throw std::invalid_argument("measure: dimension mismatch");
  return x + dy;
}

geom::Polytope output_prediction_set(const SystemModel& m, const Eigen::VectorXd& y,
                                     const Eigen::VectorXd& u, bool inflate_by_mapped_noise) {
  if (y.size() != m.state_dim() || u.size() != m.input_dim())
    throw std::invalid_argument("output_prediction_set: dimension mismatch");
  const Eigen::VectorXd center = m.A * y + m.B * u;
  geom::Polytope spread = geom::affine_image(m.process_noise, m.Bd, center);
  if (inflate_by_mapped_noise) {
    spread = geom::minkowski_sum(spread, geom::affine_image(m.measurement_noise, -m.A));
    spread = geom::minkowski_sum(spread, m.measurement_noise);
  }
  return spread;
}

}  // namespace strhc::model
