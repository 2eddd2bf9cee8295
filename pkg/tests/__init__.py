"""halfhop tests"""
