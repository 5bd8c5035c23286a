"""
qudit 신경망 분류기 엔진 (수학 코어, 특성, SVM, 학습기, 회로, 데이터)
"""
