import sys

from srtmkit.main import dispatch

sys.exit(dispatch())
