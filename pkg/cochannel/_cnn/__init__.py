""" cochannel: co-channel speech detection toolkit

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""
