#pragma once

namespace esg::stats {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation, absolute accuracy well below 1e-8 for the arguments used by
// the significance test.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided tail probability of Student's t with `dof` degrees of freedom:
// p = I_{dof/(dof+t^2)}(dof/2, 1/2).
double student_t_two_sided_p(double t, int dof);

}  // namespace esg::stats
