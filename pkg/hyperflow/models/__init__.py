from .dist import Dist, add, avg, bind, comprehend, condition, expected, map_dist, point, product, uniform
from .hyper import Hyper, InitState, hyper_joint, joint, point_hyper, rv, visible_marginal
