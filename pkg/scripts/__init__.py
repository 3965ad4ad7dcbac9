"""Development scripts for wgeodesic"""
