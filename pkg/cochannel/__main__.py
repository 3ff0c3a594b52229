""" cochannel: co-channel speech detection toolkit

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import sys

from ._cli import main

sys.exit(main())
