"""Entry point for python -m wgeodesic"""

from wgeodesic.cli import main

main() # pylint: disable=no-value-for-parameter
