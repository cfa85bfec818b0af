'''
Finite groupoids, graphs of groups and their covering theory at desk scale.
'''

__version__ = "0.1.0"
