#include "nlkg/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace nlkg {

GraphFn zero_graph(int K) {
    return [K](const State&) { return Eigen::VectorXd::Zero(K).eval(); };
}

State minus_state(const SpectralFrame& frame, const Eigen::VectorXd& a) {
    State out(frame.grid());
    for (int i = 0; i < frame.K(); ++i) out += a(i) * frame.g_minus(i);
    return out;
}

GraphFn interpolate_graph(const GraphTable& table, const SpectralFrame& frame,
                          const MobileParams& mp) {
    if (table.psi.empty()) throw ConfigError("interpolate_graph: empty table");
    // copy the table into the closure; graphs are small
    GraphTable t = table;
    return [t, &frame, mp](const State& psi) {
        std::vector<std::pair<double, int>> dist;
        dist.reserve(t.psi.size());
        for (std::size_t i = 0; i < t.psi.size(); ++i) {
            const double d = tilde_m(mp, frame, psi, t.psi[i]);
            if (d < 1e-13) return t.value[i];
            dist.push_back({d, static_cast<int>(i)});
        }
        std::sort(dist.begin(), dist.end());
        const std::size_t use = std::min<std::size_t>(3, dist.size());
        double wsum = 0.0;
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(t.value.front().size());
        for (std::size_t i = 0; i < use; ++i) {
            const double w = 1.0 / dist[i].first;
            wsum += w;
            acc += w * t.value[static_cast<std::size_t>(dist[i].second)];
        }
        return (acc / wsum).eval();
    };
}

namespace {

struct BackwardProbe {
    bool exited = false;
    double t_exit = 0.0;
    Eigen::VectorXd lambda_minus_at_exit;
};

// integrate backward until |v|_H > C0*delta or t <= -Tmax
BackwardProbe backward_probe(const State& v0, const FlowParams& p, const SpectralFrame& frame,
                             double Tmax) {
    const double exit_sq = p.C0 * p.delta * p.C0 * p.delta;
    ModFlow flow(v0, 0.0, p, frame, {});
    BackwardProbe out;
    double t = 0.0;
    while (t > -Tmax) {
        const double step = std::min(p.dt, Tmax + t);
        flow.step(-step);
        t -= step;
        if (flow.w_h_norm_sq() > exit_sq) {
            out.exited = true;
            out.t_exit = t;
            Coords c = frame.decompose(flow.v());
            out.lambda_minus_at_exit = c.lambda_minus;
            return out;
        }
    }
    return out;
}

}  // namespace

Eigen::VectorXd eval_Gstar(const State& psi, const FlowParams& p, const SpectralFrame& frame,
                           const GstarOptions& opt) {
    const int K = frame.K();
    const double scale = frame.energy_norm(psi);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(K);
    if (scale < 1e-14) return a;

    bool survived = false;
    // cyclic coordinate bisection; a single pass suffices for K = 1
    const int outer_passes = (K == 1) ? 1 : 8;
    for (int pass = 0; pass < outer_passes && !survived; ++pass) {
        double worst_move = 0.0;
        for (int comp = 0; comp < K && !survived; ++comp) {
            double radius = std::max(p.ell * scale, opt.tol);
            auto probe = [&](double val) {
                Eigen::VectorXd trial = a;
                trial(comp) = val;
                return backward_probe(psi + minus_state(frame, trial), p, frame, opt.Tmax);
            };
            double lo = -radius, hi = radius;
            BackwardProbe plo = probe(lo), phi_ = probe(hi);
            auto side = [comp](const BackwardProbe& b) {
                return b.exited ? (b.lambda_minus_at_exit(comp) > 0 ? 1 : -1) : 0;
            };
            if (side(plo) == side(phi_) && side(plo) != 0) {
                // both sides escape the same way; widen once before giving up
                lo *= 2.0;
                hi *= 2.0;
                plo = probe(lo);
                phi_ = probe(hi);
                if (side(plo) == side(phi_) && side(plo) != 0)
                    throw BracketFailure("eval_Gstar: bracket endpoints exit on the same side");
            }
            if (!plo.exited) {
                a(comp) = lo;
                survived = true;
                break;
            }
            if (!phi_.exited) {
                a(comp) = hi;
                survived = true;
                break;
            }
            // orient: lambda_minus at exit grows with (a - a*)
            if (plo.lambda_minus_at_exit(comp) > 0) std::swap(lo, hi);
            const double start = a(comp);
            while (std::abs(hi - lo) > opt.tol) {
                const double mid = 0.5 * (lo + hi);
                BackwardProbe pm = probe(mid);
                if (!pm.exited) {
                    lo = hi = mid;
                    survived = true;
                    break;
                }
                if (pm.lambda_minus_at_exit(comp) > 0)
                    hi = mid;
                else
                    lo = mid;
            }
            a(comp) = 0.5 * (lo + hi);
            worst_move = std::max(worst_move, std::abs(a(comp) - start));
        }
        if (K > 1 && worst_move < opt.tol) break;
    }
    return a;
}

std::vector<Eigen::VectorXd> graph_transform_step(const GraphFn& G, const std::vector<State>& nodes,
                                                  double T, const FlowParams& p,
                                                  const SpectralFrame& frame,
                                                  const TransformOptions& opt) {
    const int K = frame.K();
    std::vector<Eigen::VectorXd> out;
    out.reserve(nodes.size());
    for (const State& psi : nodes) {
        int evals = 0;
        // membership defect of the backward point, component `comp`
        Eigen::VectorXd a = G(psi);  // warm start from the current value
        auto defect = [&](const Eigen::VectorXd& trial) {
            ++evals;
            if (evals > opt.max_evals)
                throw PreimageNotFound("graph_transform_step: evaluation budget exhausted");
            const State back = u_prop(psi + minus_state(frame, trial), -T, p, frame);
            Coords c = frame.decompose(back);
            const State geq = back - minus_state(frame, c.lambda_minus);
            return (c.lambda_minus - G(geq)).eval();
        };
        for (int comp = 0; comp < K; ++comp) {
            double x0 = a(comp);
            Eigen::VectorXd t0 = a;
            t0(comp) = x0;
            double f0 = defect(t0)(comp);
            double x1 = x0 + std::max(1e-6, 0.1 * std::abs(x0));
            Eigen::VectorXd t1 = a;
            t1(comp) = x1;
            double f1 = defect(t1)(comp);
            while (std::abs(f1) > opt.inner_tol) {
                if (f1 == f0) throw PreimageNotFound("graph_transform_step: secant stalled");
                const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
                x0 = x1;
                f0 = f1;
                x1 = x2;
                Eigen::VectorXd t = a;
                t(comp) = x1;
                f1 = defect(t)(comp);
            }
            a(comp) = x1;
        }
        out.push_back(a);
    }
    return out;
}

double contraction_rate(const GraphFn& G0, const GraphFn& G1, const std::vector<State>& nodes,
                        double T, const FlowParams& p, const SpectralFrame& frame,
                        const TransformOptions& opt) {
    double den = 0.0;
    for (const State& psi : nodes) {
        const double nrm = frame.energy_norm(psi);
        if (nrm < 1e-14) continue;
        den = std::max(den, (G0(psi) - G1(psi)).norm() / nrm);
    }
    if (den == 0.0) return 0.0;
    const auto V0 = graph_transform_step(G0, nodes, T, p, frame, opt);
    const auto V1 = graph_transform_step(G1, nodes, T, p, frame, opt);
    double num = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double nrm = frame.energy_norm(nodes[i]);
        if (nrm < 1e-14) continue;
        num = std::max(num, (V0[i] - V1[i]).norm() / nrm);
    }
    return num / den;
}

State eval_unstable_graph(const Eigen::VectorXd& lam_plus, const FlowParams& p,
                          const SpectralFrame& frame, const UnstableOptions& opt) {
    const int K = frame.K();
    const double mag = lam_plus.norm();
    if (mag < 1e-12) return State(frame.grid());
    const double kmin = frame.kmin();
    const double T = std::min(20.0, std::max(5.0, std::log(mag / opt.floor) / kmin));

    Eigen::VectorXd seed(K);
    for (int i = 0; i < K; ++i) seed(i) = lam_plus(i) * std::exp(-frame.klist()[static_cast<std::size_t>(i)] * T);

    State v0(frame.grid());
    for (int attempt = 0; attempt < 5; ++attempt) {
        State planted(frame.grid());
        for (int i = 0; i < K; ++i) planted += seed(i) * frame.g_plus(i);
        v0 = u_prop(planted, T, p, frame);
        const Eigen::VectorXd got = frame.decompose(v0).lambda_plus;
        if ((got - lam_plus).norm() <= opt.target_tol) break;
        for (int i = 0; i < K; ++i) {
            if (std::abs(got(i)) > 0) seed(i) *= lam_plus(i) / got(i);
        }
    }
    if (opt.validate_decay) {
        const State back = u_prop(v0, -5.0, p, frame);
        const double bound = 2.0 * std::exp(-5.0 * (kmin - 0.1)) * norm_h(v0);
        if (norm_h(back) > bound)
            throw NoDecay("eval_unstable_graph: backward norm exceeds the decay bound");
    }
    return v0;
}

RestrictResult restrict_orthogonal(const GraphFn& G, const State& psi, const FlowParams& p,
                                   const SpectralFrame& frame) {
    (void)p;
    const State& JgQ = frame.J_grad_Q();
    RestrictResult res;
    double nu = 0.0;
    Eigen::VectorXd gval = G(psi);
    auto point_at = [&](double n, const Eigen::VectorXd& g) {
        return psi + n * JgQ + minus_state(frame, g);
    };
    auto n_map = [&](double n, const Eigen::VectorXd& g) {
        const State phi = point_at(n, g);
        return dot_l2(phi.second, derivative(phi.first)) / frame.HQ();
    };
    int total_iters = 0;
    double prev_step = 0.0;
    for (int refresh = 0; refresh < 3; ++refresh) {
        for (int it = 0; it < 30; ++it) {
            ++total_iters;
            const double next = n_map(nu, gval);
            const double step = std::abs(next - nu);
            if (prev_step > 0 && step > 0.9 * prev_step && step > 1e-12)
                throw NoContraction("restrict_orthogonal: Picard map is not contracting");
            prev_step = step;
            nu = next;
            if (step < 1e-10) break;
        }
        const Eigen::VectorXd refreshed = G(psi + nu * JgQ);
        const double change = (refreshed - gval).norm();
        gval = refreshed;
        if (change < 1e-12) break;
        prev_step = 0.0;
    }
    res.nu = nu;
    res.point = point_at(nu, gval);
    res.iterations = total_iters;
    res.residual_momentum =
        omega(res.point, frame.grad_Q()) + dot_l2(res.point.second, derivative(res.point.first));
    res.residual_jgrad = omega(res.point, JgQ);
    return res;
}

Trajectory reconstruct_solution(const State& v0, double c0, double t_end, const FlowParams& p,
                                const SpectralFrame& frame, double sample_dt) {
    const SolitonFamily& fam = frame.family();
    Trajectory traj;
    ModFlow flow(translate(v0, c0), c0, p, frame, {});
    double t = 0.0;
    auto record = [&]() {
        traj.t.push_back(t);
        traj.c.push_back(flow.c());
        traj.v.push_back(flow.v());
        const State w = flow.w();
        State u(frame.grid());
        const Field Qc = translate(fam.Q, flow.c());
        for (int i = 0; i < frame.grid().N; ++i) {
            u.first[i] = Qc[i] + w.first[i];
            u.second[i] = w.second[i];
        }
        traj.u.push_back(u);
    };
    record();
    double next_sample = sample_dt;
    while (t < t_end - 1e-12) {
        const double step = std::min(p.dt, t_end - t);
        flow.step(step);
        t += step;
        if (t >= next_sample - 1e-12 || t >= t_end - 1e-12) {
            next_sample += sample_dt;
            record();
        }
    }
    return traj;
}

double verify_reconstruction(const Trajectory& traj, const Nonlinearity& n, double dt, int method) {
    if (traj.u.empty()) return 0.0;
    FullFlow flow(traj.u.front(), n);
    double worst = 0.0;
    double t = 0.0;
    for (std::size_t i = 1; i < traj.u.size(); ++i) {
        const double target = traj.t[i];
        while (t < target - 1e-12) {
            const double step = std::min(dt, target - t);
            flow.step(step, method);
            t += step;
        }
        worst = std::max(worst, norm_h(flow.state() - traj.u[i]));
    }
    return worst;
}

ExitRecord trapping_experiment(const State& phi_cu, double eta, int sign, const FlowParams& p,
                               const SpectralFrame& frame, const TrapOptions& opt) {
    const Grid& g = frame.grid();
    // time reflection maps the center-unstable data and its transversal g-
    // onto the center-stable side
    State perturbed = phi_cu + (sign * eta) * frame.g_minus(0);
    State v0(perturbed.first, -1.0 * perturbed.second);

    ExitRecord rec;
    rec.eta = eta;
    rec.sign = sign;
    const double exit_norm = p.C0 * p.delta;

    if (opt.use_modulated) {
        ModFlow flow(v0, 0.0, p, frame, {});
        double t = 0.0;
        rec.sup_v = std::sqrt(flow.w_h_norm_sq());
        while (t < opt.Tmax) {
            flow.step(std::min(p.dt, opt.Tmax - t));
            t += std::min(p.dt, opt.Tmax - t);
            const double nv = std::sqrt(flow.w_h_norm_sq());
            rec.sup_v = std::max(rec.sup_v, nv);
            if (nv > exit_norm) {
                rec.t_exit = t;
                return rec;
            }
        }
        rec.trapped = true;
        rec.t_exit = opt.Tmax;
        return rec;
    }

    const SolitonFamily& fam = frame.family();
    State u0 = fam.vec_Q() + v0;
    FullFlow flow(u0, fam.nonlin);
    double c = 0.0, t = 0.0;
    auto v_at = [&](const State& u, double shift) {
        State out = translate(u, -shift);
        for (int i = 0; i < g.N; ++i) out.first[i] -= fam.Q[i];
        return out;
    };
    State v = v_at(u0, c);
    rec.sup_v = norm_h(v);
    while (t < opt.Tmax) {
        const double step = std::min(opt.dt, opt.Tmax - t);
        const double a1 = A_of_v(frame, v);
        flow.step(step, opt.method);
        t += step;
        const State vp = v_at(flow.state(), c + step * a1);
        const double a2 = A_of_v(frame, vp);
        c += 0.5 * step * (a1 + a2);
        v = v_at(flow.state(), c);
        const double nv = norm_h(v);
        rec.sup_v = std::max(rec.sup_v, nv);
        if (nv > exit_norm) {
            rec.t_exit = t;
            return rec;
        }
    }
    rec.trapped = true;
    rec.t_exit = opt.Tmax;
    return rec;
}

EnergyExpansion energy_expansion_check(const State& v, const SpectralFrame& frame) {
    const SolitonFamily& fam = frame.family();
    const Nonlinearity& n = fam.nonlin;
    const Grid& g = frame.grid();
    Coords c = frame.decompose(v);

    double cubic = 0.0;
    for (int i = 0; i < g.N; ++i) {
        const double q = fam.Q[i];
        const double a = v.first[i];
        cubic += n.primitive(q + a) - n.primitive(q) - n.f(q) * a - 0.5 * n.df(q) * a * a;
    }
    cubic *= g.h;

    const State u = fam.vec_Q() + v;
    const double ediff = energy(u, n) - fam.static_energy;
    const double quad_gamma = frame.quad_L(c.gamma);

    double cross = 0.0, diag = 0.0;
    for (int i = 0; i < frame.K(); ++i) {
        const double k = frame.klist()[static_cast<std::size_t>(i)];
        cross += k * c.lambda_plus(i) * c.lambda_minus(i);
        diag += 0.5 * k *
                (c.lambda_plus(i) * c.lambda_plus(i) + c.lambda_minus(i) * c.lambda_minus(i));
    }

    EnergyExpansion out;
    out.cubic_remainder = cubic;
    out.residual = ediff + cross - 0.5 * quad_gamma + cubic;
    out.functional = diag + 0.5 * quad_gamma - cubic;
    return out;
}

}  // namespace nlkg
