"""wgeodesic: geodesics of minimal action on the probability simplex of
a weighted graph"""

from logging import basicConfig

from wgeodesic.config import LOG_LEVEL

basicConfig(format="%(levelname)s: %(message)s", level=LOG_LEVEL)
