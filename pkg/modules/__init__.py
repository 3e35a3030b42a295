"""
Modules package for BlockMax Lab
"""
